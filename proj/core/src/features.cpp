#include "autotrack/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "autotrack/error.hpp"

namespace autotrack {

namespace {

constexpr int kOrientations = 18;
constexpr double kClip = 0.2;
constexpr double kTextureScale = 0.2357;
constexpr double kNormEps = 1e-4;

struct Gradients {
  Grid<double> magnitude;
  Grid<double> orientation;  // [0, 2pi)
};

double intensity(const Frame& f, int r, int c, int k) { return f.at(r, c, k) / 255.0; }

// Central differences in the interior, one-sided at the border. For colour
// input the channel with the strongest gradient wins.
Gradients compute_gradients(const Frame& img) {
  const int h = img.height();
  const int w = img.width();
  Gradients g{Grid<double>(h, w), Grid<double>(h, w)};
  for (int r = 0; r < h; ++r) {
    const int rp = std::max(r - 1, 0);
    const int rn = std::min(r + 1, h - 1);
    const double ry = (rn - rp) > 0 ? 1.0 / (rn - rp) : 0.0;
    for (int c = 0; c < w; ++c) {
      const int cp = std::max(c - 1, 0);
      const int cn = std::min(c + 1, w - 1);
      const double rx = (cn - cp) > 0 ? 1.0 / (cn - cp) : 0.0;
      double best = -1.0;
      double bx = 0.0;
      double by = 0.0;
      for (int k = 0; k < img.channels(); ++k) {
        const double dx = (intensity(img, r, cn, k) - intensity(img, r, cp, k)) * rx;
        const double dy = (intensity(img, rn, c, k) - intensity(img, rp, c, k)) * ry;
        const double m2 = dx * dx + dy * dy;
        if (m2 > best) {
          best = m2;
          bx = dx;
          by = dy;
        }
      }
      g.magnitude(r, c) = std::sqrt(best);
      double o = std::atan2(by, bx);
      if (o < 0.0) o += 2.0 * std::numbers::pi;
      g.orientation(r, c) = o;
    }
  }
  return g;
}

// Orientation histograms with linear interpolation across orientation bins
// and bilinear interpolation across neighbouring cells.
Tensor3<double> cell_histograms(const Gradients& g, int cell_size, int cells_y, int cells_x) {
  Tensor3<double> hist(cells_y, cells_x, kOrientations);
  const double bin_width = 2.0 * std::numbers::pi / kOrientations;
  const double area = static_cast<double>(cell_size) * cell_size;
  for (int r = 0; r < g.magnitude.rows(); ++r) {
    const double fy = (r + 0.5) / cell_size - 0.5;
    const int cy0 = static_cast<int>(std::floor(fy));
    const double wy1 = fy - cy0;
    for (int c = 0; c < g.magnitude.cols(); ++c) {
      const double m = g.magnitude(r, c) / area;
      if (m == 0.0) continue;
      const double fx = (c + 0.5) / cell_size - 0.5;
      const int cx0 = static_cast<int>(std::floor(fx));
      const double wx1 = fx - cx0;

      const double ob = g.orientation(r, c) / bin_width;
      const int o0 = static_cast<int>(std::floor(ob)) % kOrientations;
      const int o1 = (o0 + 1) % kOrientations;
      const double wo1 = ob - std::floor(ob);

      const std::array<int, 2> ys{cy0, cy0 + 1};
      const std::array<double, 2> wys{1.0 - wy1, wy1};
      const std::array<int, 2> xs{cx0, cx0 + 1};
      const std::array<double, 2> wxs{1.0 - wx1, wx1};
      for (int a = 0; a < 2; ++a) {
        if (ys[a] < 0 || ys[a] >= cells_y || wys[a] == 0.0) continue;
        for (int b = 0; b < 2; ++b) {
          if (xs[b] < 0 || xs[b] >= cells_x || wxs[b] == 0.0) continue;
          const double v = m * wys[a] * wxs[b];
          hist(ys[a], xs[b], o0) += v * (1.0 - wo1);
          hist(ys[a], xs[b], o1) += v * wo1;
        }
      }
    }
  }
  return hist;
}

void fhog_from_histograms(const Tensor3<double>& hist, FeatureTensor& out) {
  const int cy = hist.rows();
  const int cx = hist.cols();
  constexpr int half = kOrientations / 2;

  Grid<double> energy(cy, cx);
  for (int i = 0; i < cy; ++i) {
    for (int j = 0; j < cx; ++j) {
      double e = 0.0;
      for (int o = 0; o < half; ++o) {
        const double s = hist(i, j, o) + hist(i, j, o + half);
        e += s * s;
      }
      energy(i, j) = e;
    }
  }
  auto en = [&](int i, int j) {
    return energy(std::clamp(i, 0, cy - 1), std::clamp(j, 0, cx - 1));
  };

  for (int i = 0; i < cy; ++i) {
    for (int j = 0; j < cx; ++j) {
      // Four 2x2 blocks containing the cell.
      std::array<double, 4> norm{};
      int b = 0;
      for (int di : {-1, 0}) {
        for (int dj : {-1, 0}) {
          const double s = en(i + di, j + dj) + en(i + di + 1, j + dj) + en(i + di, j + dj + 1) +
                           en(i + di + 1, j + dj + 1);
          norm[b++] = 1.0 / std::sqrt(s + kNormEps);
        }
      }

      std::array<double, 4> texture{};
      for (int o = 0; o < kOrientations; ++o) {
        double acc = 0.0;
        for (int n = 0; n < 4; ++n) {
          const double v = std::min(hist(i, j, o) * norm[n], kClip);
          acc += v;
          texture[n] += v;
        }
        out(i, j, o) = 0.5 * acc;
      }
      for (int o = 0; o < half; ++o) {
        const double s = hist(i, j, o) + hist(i, j, o + half);
        double acc = 0.0;
        for (int n = 0; n < 4; ++n) acc += std::min(s * norm[n], kClip);
        out(i, j, kOrientations + o) = 0.5 * acc;
      }
      for (int n = 0; n < 4; ++n) out(i, j, kOrientations + half + n) = kTextureScale * texture[n];
    }
  }
}

Frame pad_to_multiple(const Frame& patch, int cell_size) {
  const int w = (patch.width() + cell_size - 1) / cell_size * cell_size;
  const int h = (patch.height() + cell_size - 1) / cell_size * cell_size;
  if (w == patch.width() && h == patch.height()) return patch;
  Frame out(w, h, patch.channels());
  for (int r = 0; r < h; ++r) {
    const int sr = std::min(r, patch.height() - 1);
    for (int c = 0; c < w; ++c) {
      const int sc = std::min(c, patch.width() - 1);
      for (int k = 0; k < patch.channels(); ++k) out.at(r, c, k) = patch.at(sr, sc, k);
    }
  }
  return out;
}

}  // namespace

FeatureTensor extract_features(const Frame& patch, int cell_size, const FeatureOptions& options) {
  if (cell_size < 1) throw Error(Errc::InvalidArgument, "cell_size must be >= 1");
  if (patch.width() < cell_size || patch.height() < cell_size) {
    throw Error(Errc::PatchTooSmall, std::to_string(patch.width()) + "x" +
                                         std::to_string(patch.height()) + " patch, cell " +
                                         std::to_string(cell_size));
  }
  if (options.channel_count() == 0) {
    throw Error(Errc::InvalidArgument, "no feature channels enabled");
  }
  const Frame img = pad_to_multiple(patch, cell_size);
  const int cy = img.height() / cell_size;
  const int cx = img.width() / cell_size;
  FeatureTensor out(cy, cx, options.channel_count());

  const int gray_channel = options.fhog ? kFhogChannels : 0;
  if (options.fhog) {
    FeatureTensor hog(cy, cx, kFhogChannels);
    fhog_from_histograms(cell_histograms(compute_gradients(img), cell_size, cy, cx), hog);
    std::copy(hog.values().begin(), hog.values().end(), out.values().begin());
  }
  if (options.grayscale) {
    const Frame gray = to_gray(img);
    const double inv = 1.0 / (cell_size * cell_size);
    for (int i = 0; i < cy; ++i) {
      for (int j = 0; j < cx; ++j) {
        double acc = 0.0;
        for (int r = i * cell_size; r < (i + 1) * cell_size; ++r) {
          for (int c = j * cell_size; c < (j + 1) * cell_size; ++c) acc += gray.at(r, c) / 255.0;
        }
        out(i, j, gray_channel) = acc * inv - 0.5;
      }
    }
  }
  return out;
}

std::vector<double> hann_window(int length) {
  if (length <= 1) return std::vector<double>(std::max(length, 0), 1.0);
  std::vector<double> w(length);
  for (int n = 0; n < length; ++n) {
    w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / (length - 1)));
  }
  return w;
}

FeatureTensor apply_window(const FeatureTensor& features) {
  const auto wr = hann_window(features.rows());
  const auto wc = hann_window(features.cols());
  FeatureTensor out = features;
  for (int k = 0; k < out.channels(); ++k) {
    for (int i = 0; i < out.rows(); ++i) {
      for (int j = 0; j < out.cols(); ++j) out(i, j, k) *= wr[i] * wc[j];
    }
  }
  return out;
}

}  // namespace autotrack
