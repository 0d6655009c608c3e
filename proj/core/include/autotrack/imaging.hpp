#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace autotrack {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

/// Axis-aligned box, 0-based top-left corner, real-valued.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  Vec2 center() const noexcept { return {x + w / 2.0, y + h / 2.0}; }
  bool valid() const noexcept;
  static BBox from_center(Vec2 c, double w, double h) noexcept {
    return {c.x - w / 2.0, c.y - h / 2.0, w, h};
  }

  bool operator==(const BBox&) const = default;
};

/// 8-bit image, interleaved channels (1 = gray, 3 = RGB).
class Frame {
 public:
  Frame() = default;
  /// Throws Errc::InvalidArgument on empty geometry or unsupported channel count.
  Frame(int width, int height, int channels, uint8_t fill = 0);
  Frame(int width, int height, int channels, std::vector<uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return pixels_.empty(); }

  uint8_t& at(int row, int col, int ch = 0) noexcept {
    return pixels_[(static_cast<size_t>(row) * width_ + col) * channels_ + ch];
  }
  uint8_t at(int row, int col, int ch = 0) const noexcept {
    return pixels_[(static_cast<size_t>(row) * width_ + col) * channels_ + ch];
  }

  std::span<uint8_t> pixels() noexcept { return pixels_; }
  std::span<const uint8_t> pixels() const noexcept { return pixels_; }

  bool operator==(const Frame&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<uint8_t> pixels_;
};

/// ITU-R 601 luma; returns the input unchanged if already single-channel.
Frame to_gray(const Frame& frame);

/// Crop of `size` (rounded to whole pixels) centred at `center` (rounded to the
/// nearest pixel). Pixels outside the frame replicate the nearest edge pixel.
Frame extract_patch(const Frame& frame, Vec2 center, Vec2 size);

/// Bilinear resampling with pixel-centre alignment. Resizing to the source
/// size returns an identical frame.
Frame resize(const Frame& frame, int target_width, int target_height);

}  // namespace autotrack
