#include "autotrack/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "autotrack/error.hpp"

namespace autotrack {

namespace {
double log_of(double v, LogBase base) {
  return base == LogBase::Natural ? std::log(v) : std::log10(v);
}

int circular_distance(int i, int centre, int n) {
  const int d = std::abs(i - centre);
  return std::min(d, n - d);
}
}  // namespace

BaseWeights build_base_weights(int rows, int cols, int object_rows, int object_cols,
                               double u_min, double u_slope) {
  if (rows < 1 || cols < 1 || object_rows < 1 || object_cols < 1 || object_rows > rows ||
      object_cols > cols) {
    throw Error(Errc::InvalidArgument, "object cells must fit inside the weight map");
  }
  BaseWeights b{Grid<double>(rows, cols), Grid<uint8_t>(rows, cols, 0)};
  const int cr = rows / 2;
  const int cc = cols / 2;
  for (int i = 0; i < rows; ++i) {
    const double di = static_cast<double>(circular_distance(i, cr, rows)) / object_rows;
    for (int j = 0; j < cols; ++j) {
      const double dj = static_cast<double>(circular_distance(j, cc, cols)) / object_cols;
      b.u_base(i, j) = u_min + u_slope * (di * di + dj * dj);
    }
  }
  const int r0 = cr - object_rows / 2;
  const int c0 = cc - object_cols / 2;
  for (int i = r0; i < r0 + object_rows; ++i) {
    for (int j = c0; j < c0 + object_cols; ++j) b.crop_mask(i, j) = 1;
  }
  return b;
}

Grid<double> spatial_regularizer(const VariationVector& pi, const BaseWeights& base,
                                 double delta, LogBase log_base) {
  if (!pi.pi.same_shape(base.u_base)) {
    throw Error(Errc::InvalidArgument, "variation map and weights differ in shape");
  }
  Grid<double> u = base.u_base;
  for (int i = 0; i < u.rows(); ++i) {
    for (int j = 0; j < u.cols(); ++j) {
      if (base.crop_mask(i, j)) u(i, j) += delta * log_of(pi.pi(i, j) + 1.0, log_base);
    }
  }
  return u;
}

TemporalReference temporal_reference(double global_norm, const RegularizationParams& params) {
  TemporalReference t;
  t.learn = !(global_norm > params.phi);
  t.theta_ref = params.zeta / (1.0 + log_of(params.nu * global_norm + 1.0, params.log_base));
  return t;
}

}  // namespace autotrack
