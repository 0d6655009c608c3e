#include "autotrack/response.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "autotrack/error.hpp"
#include "autotrack/spectral.hpp"

namespace autotrack {

namespace {
int wrap(int i, int n) {
  const int m = i % n;
  return m < 0 ? m + n : m;
}

double vertex_offset(double vm, double v0, double vp) {
  const double curvature = vm - 2.0 * v0 + vp;
  if (!(curvature < 0.0)) return 0.0;
  const double d = (vm - vp) / (2.0 * curvature);
  const double bound = std::nextafter(0.5, 0.0);
  return std::clamp(d, -bound, bound);
}
}  // namespace

ResponseMap make_response(Grid<double> values) {
  ResponseMap r;
  r.values = std::move(values);
  if (r.values.empty()) return r;
  double best = r.values(0, 0);
  for (int i = 0; i < r.values.rows(); ++i) {
    for (int j = 0; j < r.values.cols(); ++j) {
      if (r.values(i, j) > best) {
        best = r.values(i, j);
        r.peak_pos = {i, j};
      }
    }
  }
  r.peak_value = best;
  r.peak_subcell = subcell_peak(r);
  return r;
}

ResponseMap detect(const SpectralBank& z_hat, const SpectralBank& g_hat) {
  if (!z_hat.same_shape(g_hat)) {
    throw Error(Errc::BankShapeMismatch,
                std::to_string(z_hat.rows()) + "x" + std::to_string(z_hat.cols()) + "x" +
                    std::to_string(z_hat.channels()) + " vs " + std::to_string(g_hat.rows()) +
                    "x" + std::to_string(g_hat.cols()) + "x" + std::to_string(g_hat.channels()));
  }
  Grid<Complex> acc(z_hat.rows(), z_hat.cols());
  auto out = acc.values();
  for (int k = 0; k < z_hat.channels(); ++k) {
    const auto z = z_hat.channel(k);
    const auto g = g_hat.channel(k);
    for (size_t j = 0; j < out.size(); ++j) out[j] += z[j] * std::conj(g[j]);
  }
  return make_response(idft2_real(acc));
}

SubcellOffset subcell_peak(const ResponseMap& r) {
  const auto& v = r.values;
  if (v.empty()) return {};
  const int i = r.peak_pos.row;
  const int j = r.peak_pos.col;
  const int h = v.rows();
  const int w = v.cols();
  SubcellOffset off;
  if (h >= 3) off.dr = vertex_offset(v(wrap(i - 1, h), j), v(i, j), v(wrap(i + 1, h), j));
  if (w >= 3) off.dc = vertex_offset(v(i, wrap(j - 1, w)), v(i, j), v(i, wrap(j + 1, w)));
  return off;
}

SubcellOffset peak_displacement(const ResponseMap& r) {
  int dr = r.peak_pos.row;
  int dc = r.peak_pos.col;
  if (dr > r.values.rows() / 2) dr -= r.values.rows();
  if (dc > r.values.cols() / 2) dc -= r.values.cols();
  return {dr + r.peak_subcell.dr, dc + r.peak_subcell.dc};
}

Grid<double> circular_shift(const Grid<double>& in, int dr, int dc) {
  Grid<double> out(in.rows(), in.cols());
  for (int i = 0; i < in.rows(); ++i) {
    const int oi = wrap(i + dr, in.rows());
    for (int j = 0; j < in.cols(); ++j) out(oi, wrap(j + dc, in.cols())) = in(i, j);
  }
  return out;
}

VariationVector local_variation(const ResponseMap& curr, const ResponseMap& prev) {
  if (!curr.values.same_shape(prev.values)) {
    throw Error(Errc::BankShapeMismatch, "response maps differ in shape");
  }
  const Grid<double> aligned =
      circular_shift(curr.values, prev.peak_pos.row - curr.peak_pos.row,
                     prev.peak_pos.col - curr.peak_pos.col);
  const double eps = std::max(1e-4, 1e-2 * std::abs(prev.peak_value));

  Grid<double> pi(prev.values.rows(), prev.values.cols());
  for (int i = 0; i < pi.rows(); ++i) {
    for (int j = 0; j < pi.cols(); ++j) {
      double denom = prev.values(i, j);
      if (std::abs(denom) < eps) denom = denom < 0.0 ? -eps : eps;
      pi(i, j) = std::abs((aligned(i, j) - prev.values(i, j)) / denom);
    }
  }

  VariationVector out;
  out.pi = circular_shift(pi, pi.rows() / 2 - prev.peak_pos.row, pi.cols() / 2 - prev.peak_pos.col);
  double s = 0.0;
  for (double p : out.pi.values()) s += p * p;
  out.global_norm = std::sqrt(s);
  return out;
}

}  // namespace autotrack
