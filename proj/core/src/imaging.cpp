#include "autotrack/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "autotrack/error.hpp"

namespace autotrack {

bool BBox::valid() const noexcept {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) &&
         w > 0.0 && h > 0.0;
}

namespace {
void check_geometry(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw Error(Errc::InvalidArgument,
                "frame size " + std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw Error(Errc::InvalidArgument, "frame channels " + std::to_string(channels));
  }
}
}  // namespace

Frame::Frame(int width, int height, int channels, uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  check_geometry(width, height, channels);
  pixels_.assign(static_cast<size_t>(width) * height * channels, fill);
}

Frame::Frame(int width, int height, int channels, std::vector<uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  check_geometry(width, height, channels);
  if (pixels_.size() != static_cast<size_t>(width) * height * channels) {
    throw Error(Errc::InvalidArgument, "pixel buffer does not match frame geometry");
  }
}

Frame to_gray(const Frame& frame) {
  if (frame.channels() == 1) return frame;
  Frame out(frame.width(), frame.height(), 1);
  for (int r = 0; r < frame.height(); ++r) {
    for (int c = 0; c < frame.width(); ++c) {
      const double luma = 0.299 * frame.at(r, c, 0) + 0.587 * frame.at(r, c, 1) +
                          0.114 * frame.at(r, c, 2);
      out.at(r, c) = static_cast<uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
    }
  }
  return out;
}

Frame extract_patch(const Frame& frame, Vec2 center, Vec2 size) {
  const int w = std::max(1, static_cast<int>(std::lround(size.x)));
  const int h = std::max(1, static_cast<int>(std::lround(size.y)));
  const int x0 = static_cast<int>(std::lround(center.x)) - w / 2;
  const int y0 = static_cast<int>(std::lround(center.y)) - h / 2;
  const int ch = frame.channels();

  Frame out(w, h, ch);
  for (int r = 0; r < h; ++r) {
    const int sr = std::clamp(y0 + r, 0, frame.height() - 1);
    for (int c = 0; c < w; ++c) {
      const int sc = std::clamp(x0 + c, 0, frame.width() - 1);
      for (int k = 0; k < ch; ++k) out.at(r, c, k) = frame.at(sr, sc, k);
    }
  }
  return out;
}

Frame resize(const Frame& frame, int target_width, int target_height) {
  if (target_width < 1 || target_height < 1) {
    throw Error(Errc::InvalidArgument, "resize target must be at least 1x1");
  }
  if (target_width == frame.width() && target_height == frame.height()) return frame;

  const int ch = frame.channels();
  const double sx = static_cast<double>(frame.width()) / target_width;
  const double sy = static_cast<double>(frame.height()) / target_height;
  Frame out(target_width, target_height, ch);

  for (int r = 0; r < target_height; ++r) {
    const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, frame.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, frame.height() - 1);
    const double wy = fy - y0;
    for (int c = 0; c < target_width; ++c) {
      const double fx = std::clamp((c + 0.5) * sx - 0.5, 0.0, frame.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, frame.width() - 1);
      const double wx = fx - x0;
      for (int k = 0; k < ch; ++k) {
        const double top = frame.at(y0, x0, k) * (1.0 - wx) + frame.at(y0, x1, k) * wx;
        const double bottom = frame.at(y1, x0, k) * (1.0 - wx) + frame.at(y1, x1, k) * wx;
        const double v = top * (1.0 - wy) + bottom * wy;
        out.at(r, c, k) = static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace autotrack
