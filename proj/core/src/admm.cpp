#include "autotrack/admm.hpp"

#include <cmath>
#include <string>

#include "autotrack/error.hpp"
#include "autotrack/spectral.hpp"

namespace autotrack {

namespace {

void require_same_shape(const SpectralBank& a, const SpectralBank& b, const char* what) {
  if (!a.same_shape(b)) throw Error(Errc::BankShapeMismatch, what);
}

bool all_finite(std::span<const Complex> v) {
  for (const Complex& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_finite(bool ok, int round, const char* what) {
  if (!ok) {
    throw Error(Errc::AdmmDiverged, "non-finite " + std::string(what) + " at iteration " +
                                        std::to_string(round));
  }
}

}  // namespace

SpectralBank update_g(const SpectralBank& x_hat, const Grid<Complex>& y_hat,
                      const SpectralBank& g_prev_hat, const SpectralBank& v_hat,
                      const SpectralBank& h_hat, double gamma, double theta) {
  require_same_shape(x_hat, g_prev_hat, "g_prev_hat");
  require_same_shape(x_hat, v_hat, "v_hat");
  require_same_shape(x_hat, h_hat, "h_hat");
  if (y_hat.rows() != x_hat.rows() || y_hat.cols() != x_hat.cols()) {
    throw Error(Errc::BankShapeMismatch, "y_hat");
  }
  const int n = x_hat.plane_size();
  const int channels = x_hat.channels();
  const auto y = y_hat.values();

  // Pass 1: rho into the output, and the per-pixel reductions x^H x, x^H rho.
  SpectralBank g(x_hat.rows(), x_hat.cols(), channels);
  std::vector<double> sxx(n, 0.0);
  std::vector<Complex> sxr(n);
  for (int k = 0; k < channels; ++k) {
    const auto x = x_hat.channel(k);
    const auto gp = g_prev_hat.channel(k);
    const auto v = v_hat.channel(k);
    const auto hh = h_hat.channel(k);
    auto out = g.channel(k);
    for (int j = 0; j < n; ++j) {
      const Complex rho = x[j] * std::conj(y[j]) + theta * gp[j] - gamma * v[j] + gamma * hh[j];
      out[j] = rho;
      sxx[j] += std::norm(x[j]);
      sxr[j] += std::conj(x[j]) * rho;
    }
  }
  // Pass 2: g = (rho - x (x^H rho) / (gamma + theta + x^H x)) / (gamma + theta).
  const double c = gamma + theta;
  for (int j = 0; j < n; ++j) sxr[j] /= (c + sxx[j]);
  for (int k = 0; k < channels; ++k) {
    const auto x = x_hat.channel(k);
    auto out = g.channel(k);
    for (int j = 0; j < n; ++j) out[j] = (out[j] - x[j] * sxr[j]) / c;
  }
  return g;
}

FeatureTensor update_h(const SpectralBank& g_hat, const SpectralBank& v_hat,
                       const Grid<double>& u_tilde, double gamma) {
  require_same_shape(g_hat, v_hat, "v_hat");
  if (u_tilde.rows() != g_hat.rows() || u_tilde.cols() != g_hat.cols()) {
    throw Error(Errc::BankShapeMismatch, "u_tilde");
  }
  SpectralBank sum = g_hat;
  {
    auto s = sum.values();
    const auto v = v_hat.values();
    for (size_t i = 0; i < s.size(); ++i) s[i] += v[i];
  }
  FeatureTensor h = idft2_real(sum);
  const double gt = gamma * g_hat.plane_size();
  const auto u = u_tilde.values();
  for (int k = 0; k < h.channels(); ++k) {
    auto hk = h.channel(k);
    for (size_t j = 0; j < hk.size(); ++j) hk[j] = gt * hk[j] / (u[j] * u[j] + gt);
  }
  return h;
}

double update_theta(const SpectralBank& g_hat, const SpectralBank& g_prev_hat, double theta_ref) {
  require_same_shape(g_hat, g_prev_hat, "g_prev_hat");
  const auto g = g_hat.values();
  const auto gp = g_prev_hat.values();
  double s = 0.0;
  for (size_t i = 0; i < g.size(); ++i) s += std::norm(g[i] - gp[i]);
  s /= g_hat.plane_size();
  return std::max(0.0, theta_ref - s / 2.0);
}

void update_multiplier(SpectralBank& v_hat, const SpectralBank& g_hat, const SpectralBank& h_hat,
                       double& gamma, const StepSchedule& schedule) {
  require_same_shape(v_hat, g_hat, "g_hat");
  require_same_shape(v_hat, h_hat, "h_hat");
  auto v = v_hat.values();
  const auto g = g_hat.values();
  const auto h = h_hat.values();
  for (size_t i = 0; i < v.size(); ++i) v[i] += g[i] - h[i];
  gamma = std::min(schedule.gamma_max, schedule.beta * gamma);
}

double objective(const AdmmProblem& p, const FeatureTensor& h, const SpectralBank& h_hat,
                 double theta) {
  const int n = p.x_hat.plane_size();
  const auto y = p.y_hat.values();
  std::vector<Complex> model(n);
  for (int k = 0; k < p.x_hat.channels(); ++k) {
    const auto x = p.x_hat.channel(k);
    const auto g = h_hat.channel(k);
    for (int j = 0; j < n; ++j) model[j] += x[j] * std::conj(g[j]);
  }
  double data = 0.0;
  for (int j = 0; j < n; ++j) data += std::norm(y[j] - model[j]);

  double spatial = 0.0;
  const auto u = p.u_tilde.values();
  for (int k = 0; k < h.channels(); ++k) {
    const auto hk = h.channel(k);
    for (int j = 0; j < n; ++j) spatial += (u[j] * hk[j]) * (u[j] * hk[j]);
  }

  double e = 0.5 * data + 0.5 * spatial;
  if (p.temporal != TemporalMode::None) {
    const auto g = h_hat.values();
    const auto gp = p.g_prev_hat.values();
    double change = 0.0;
    for (size_t i = 0; i < g.size(); ++i) change += std::norm(g[i] - gp[i]);
    e += 0.5 * theta * change;
  }
  if (p.temporal == TemporalMode::Adaptive) {
    e += 0.5 * n * (theta - p.theta_ref) * (theta - p.theta_ref);
  }
  return e;
}

double objective(const AdmmProblem& p, const FeatureTensor& h, double theta) {
  return objective(p, h, dft2(h), theta);
}

AdmmSolution solve(const AdmmProblem& p) {
  if (p.iters < 1) throw Error(Errc::InvalidArgument, "admm iterations must be >= 1");
  if (p.y_hat.rows() != p.x_hat.rows() || p.y_hat.cols() != p.x_hat.cols() ||
      p.u_tilde.rows() != p.x_hat.rows() || p.u_tilde.cols() != p.x_hat.cols()) {
    throw Error(Errc::BankShapeMismatch, "label or weights do not match the sample");
  }
  const bool has_prev = p.temporal != TemporalMode::None;
  const SpectralBank zeros(p.x_hat.rows(), p.x_hat.cols(), p.x_hat.channels());
  if (has_prev) require_same_shape(p.x_hat, p.g_prev_hat, "g_prev_hat");
  const SpectralBank& g_prev = has_prev ? p.g_prev_hat : zeros;

  AdmmSolution sol;
  sol.g_hat = g_prev;
  sol.h = idft2_real(g_prev);
  SpectralBank h_hat = g_prev;
  SpectralBank v_hat = zeros;
  double gamma = p.schedule.gamma0;
  double theta = has_prev ? p.theta_ref : 0.0;

  for (int round = 0; round < p.iters; ++round) {
    sol.g_hat = update_g(p.x_hat, p.y_hat, g_prev, v_hat, h_hat, gamma, theta);
    check_finite(all_finite(sol.g_hat.values()), round, "filter spectrum");

    sol.h = update_h(sol.g_hat, v_hat, p.u_tilde, gamma);
    check_finite(all_finite(sol.h.values()), round, "spatial filter");
    h_hat = dft2(sol.h);

    if (p.temporal == TemporalMode::Adaptive) {
      theta = update_theta(sol.g_hat, g_prev, p.theta_ref);
      check_finite(std::isfinite(theta), round, "theta");
    }

    double res2 = 0.0;
    double g2 = 0.0;
    {
      const auto g = sol.g_hat.values();
      const auto hh = h_hat.values();
      for (size_t i = 0; i < g.size(); ++i) {
        res2 += std::norm(g[i] - hh[i]);
        g2 += std::norm(g[i]);
      }
    }
    sol.residual_trace.push_back(g2 > 0.0 ? std::sqrt(res2 / g2) : std::sqrt(res2));
    sol.objective_trace.push_back(objective(p, sol.h, h_hat, theta));

    update_multiplier(v_hat, sol.g_hat, h_hat, gamma, p.schedule);
    check_finite(all_finite(v_hat.values()), round, "multiplier");
  }
  sol.theta_opt = theta;
  return sol;
}

Grid<double> gaussian_label(int rows, int cols, double sigma) {
  Grid<double> y(rows, cols);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int i = 0; i < rows; ++i) {
    const int di = std::min(i, rows - i);
    for (int j = 0; j < cols; ++j) {
      const int dj = std::min(j, cols - j);
      y(i, j) = std::exp(-(di * di + dj * dj) * inv);
    }
  }
  return y;
}

}  // namespace autotrack
