#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "autotrack/admm.hpp"
#include "autotrack/spectral.hpp"
#include "autotrack/tensor.hpp"

namespace autotrack::testing {

inline Grid<double> random_grid(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Grid<double> g(rows, cols);
  for (double& v : g.values()) v = n(rng);
  return g;
}

inline FeatureTensor random_tensor(int rows, int cols, int k, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  FeatureTensor t(rows, cols, k);
  for (double& v : t.values()) v = n(rng);
  return t;
}

inline Grid<Complex> random_complex_grid(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Grid<Complex> g(rows, cols);
  for (Complex& v : g.values()) v = {n(rng), n(rng)};
  return g;
}

/// O(T^2) transform straight from the definition; sign = -1 forward, +1 inverse (unscaled).
inline Grid<Complex> naive_dft2(const Grid<Complex>& in, int sign = -1) {
  const int h = in.rows();
  const int w = in.cols();
  Grid<Complex> out(h, w);
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      Complex s = 0.0;
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const double a = sign * 2.0 * std::numbers::pi * (double(u * r) / h + double(v * c) / w);
          s += in(r, c) * Complex(std::cos(a), std::sin(a));
        }
      }
      out(u, v) = s;
    }
  }
  return out;
}

inline Grid<Complex> to_complex(const Grid<double>& g) {
  Grid<Complex> out(g.rows(), g.cols());
  for (int i = 0; i < g.size(); ++i) out.values()[i] = g.values()[i];
  return out;
}

/// Circular cross-correlation in the spatial domain:
/// out(r, c) = sum_k sum_(i,j) z_k(i + r, j + c) g_k(i, j).
inline Grid<double> spatial_correlation(const FeatureTensor& z, const FeatureTensor& g) {
  const int h = z.rows();
  const int w = z.cols();
  Grid<double> out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int k = 0; k < z.channels(); ++k) {
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) s += z((i + r) % h, (j + c) % w, k) * g(i, j, k);
        }
      }
      out(r, c) = s;
    }
  }
  return out;
}

/// Random training problem: unit-scale features, Gaussian label, small
/// previous filter, weights in [0.1, 5].
inline AdmmProblem random_problem(int rows, int cols, int k, std::mt19937_64& rng) {
  AdmmProblem p;
  p.x_hat = dft2(random_tensor(rows, cols, k, rng));
  std::uniform_real_distribution<double> sig(0.5, 2.0);
  p.y_hat = dft2(gaussian_label(rows, cols, sig(rng)));
  p.g_prev_hat = dft2(random_tensor(rows, cols, k, rng, 0.1));
  std::uniform_real_distribution<double> uw(0.1, 5.0);
  p.u_tilde = Grid<double>(rows, cols);
  for (double& v : p.u_tilde.values()) v = uw(rng);
  p.theta_ref = 13.0;
  p.temporal = TemporalMode::Adaptive;
  return p;
}

inline SpectralBank random_bank(int rows, int cols, int k, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  SpectralBank b(rows, cols, k);
  for (Complex& v : b.values()) v = {n(rng), n(rng)};
  return b;
}

inline double max_rel_diff(const SpectralBank& a, const SpectralBank& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.values().size(); ++i) {
    num = std::max(num, std::abs(a.values()[i] - b.values()[i]));
    den = std::max(den, std::abs(b.values()[i]));
  }
  return num / den;
}

/// Per-pixel dense solve of (x x^H + (gamma + theta) I) g = rho.
inline SpectralBank dense_update_g(const SpectralBank& x, const Grid<Complex>& y, const SpectralBank& gp,
                            const SpectralBank& v, const SpectralBank& h, double gamma,
                            double theta) {
  const int K = x.channels();
  SpectralBank g(x.rows(), x.cols(), K);
  for (int j = 0; j < x.plane_size(); ++j) {
    Eigen::VectorXcd xv(K), rho(K);
    for (int k = 0; k < K; ++k) {
      xv(k) = x.channel(k)[j];
      rho(k) = xv(k) * std::conj(y.values()[j]) + theta * gp.channel(k)[j] - gamma * v.channel(k)[j] +
               gamma * h.channel(k)[j];
    }
    Eigen::MatrixXcd M = xv * xv.adjoint();
    M.diagonal().array() += gamma + theta;
    const Eigen::VectorXcd sol = M.partialPivLu().solve(rho);
    for (int k = 0; k < K; ++k) g.channel(k)[j] = sol(k);
  }
  return g;
}

/// 1/2 ||u . h||^2 + gamma/2 ||g - DFT(h) + v||^2
inline double h_objective(const FeatureTensor& h, const SpectralBank& g, const SpectralBank& v,
                   const Grid<double>& u, double gamma) {
  const SpectralBank hh = dft2(h);
  double a = 0.0, b = 0.0;
  for (int k = 0; k < h.channels(); ++k) {
    for (int j = 0; j < h.plane_size(); ++j) {
      const double uh = u.values()[j] * h.channel(k)[j];
      a += uh * uh;
      b += std::norm(g.channel(k)[j] - hh.channel(k)[j] + v.channel(k)[j]);
    }
  }
  return 0.5 * a + 0.5 * gamma * b;
}

/// Central-difference gradient norm of h_objective at h, relative to the
/// gradient norm at h = 0.
inline double h_stationarity(const FeatureTensor& h, const SpectralBank& g, const SpectralBank& v,
                             const Grid<double>& u, double gamma, double step = 1e-6) {
  const FeatureTensor zero(h.rows(), h.cols(), h.channels());
  double grad2 = 0.0, scale2 = 0.0;
  for (size_t i = 0; i < h.values().size(); ++i) {
    for (const FeatureTensor* at : {&h, &zero}) {
      FeatureTensor a = *at, b = *at;
      a.values()[i] += step;
      b.values()[i] -= step;
      const double d = (h_objective(a, g, v, u, gamma) - h_objective(b, g, v, u, gamma)) / (2 * step);
      (at == &h ? grad2 : scale2) += d * d;
    }
  }
  return std::sqrt(grad2 / scale2);
}

/// argmin over a grid of theta S / 2 + (theta - ref)^2 / 2.
inline double theta_grid_search(double S, double ref, double step = 1e-4) {
  double best = 0.0, best_e = INFINITY;
  const int n = static_cast<int>(std::ceil(std::max(ref, 0.0) / step)) + 1;
  for (int i = 0; i <= n; ++i) {
    const double th = i * step;
    const double e = th / 2 * S + 0.5 * (th - ref) * (th - ref);
    if (e < best_e) best_e = e, best = th;
  }
  return best;
}

struct DenseOptimum {
  FeatureTensor h;
  double theta = 0.0;
  double objective = 0.0;
};

/// Joint minimizer of the training objective over (h, theta) with g = DFT(h),
/// by alternating an exact normal-equation solve in h with the closed-form
/// theta step. Built from an explicit DFT matrix, independent of the FFT path.
inline DenseOptimum dense_joint_optimum(const AdmmProblem& p, int max_rounds = 100000) {
  const int h = p.x_hat.rows();
  const int w = p.x_hat.cols();
  const int K = p.x_hat.channels();
  const int T = h * w;
  Eigen::MatrixXcd F(T, T);
  for (int a = 0; a < T; ++a) {
    for (int b = 0; b < T; ++b) {
      const int u = a / w, v = a % w, r = b / w, c = b % w;
      const double ang = -2.0 * std::numbers::pi * (double(u * r) / h + double(v * c) / w);
      F(a, b) = Complex(std::cos(ang), std::sin(ang));
    }
  }
  // data residual yhat - sum_k diag(x_k) conj(F) h_k as a real system
  Eigen::MatrixXcd A(T, K * T);
  for (int k = 0; k < K; ++k) {
    for (int a = 0; a < T; ++a) {
      const Complex xa = p.x_hat.channel(k)[a];
      for (int b = 0; b < T; ++b) A(a, k * T + b) = xa * std::conj(F(a, b));
    }
  }
  Eigen::MatrixXd Ar(2 * T, K * T);
  Ar << A.real(), A.imag();
  Eigen::VectorXd b(2 * T);
  for (int a = 0; a < T; ++a) {
    b(a) = p.y_hat.values()[a].real();
    b(T + a) = p.y_hat.values()[a].imag();
  }
  Eigen::VectorXd hp(K * T);
  Eigen::VectorXd d(K * T);
  const FeatureTensor g_prev = idft2_real(p.g_prev_hat);
  for (int k = 0; k < K; ++k) {
    for (int a = 0; a < T; ++a) {
      hp(k * T + a) = g_prev.channel(k)[a];
      d(k * T + a) = p.u_tilde.values()[a] * p.u_tilde.values()[a];
    }
  }
  const Eigen::MatrixXd AtA = Ar.transpose() * Ar;
  const Eigen::VectorXd Atb = Ar.transpose() * b;

  double theta = p.temporal == TemporalMode::None ? 0.0 : p.theta_ref;
  Eigen::VectorXd x = hp;
  for (int round = 0; round < max_rounds; ++round) {
    Eigen::MatrixXd M = AtA;
    M.diagonal() += d + Eigen::VectorXd::Constant(K * T, theta * T);
    x = M.ldlt().solve(Atb + theta * T * hp);
    if (p.temporal != TemporalMode::Adaptive) break;
    const double next = std::max(0.0, p.theta_ref - (x - hp).squaredNorm() / 2.0);
    const bool done = std::abs(next - theta) <= 1e-15 * std::max(1.0, theta);
    theta = next;
    if (done) break;
  }
  DenseOptimum out;
  out.h = FeatureTensor(h, w, K);
  for (int i = 0; i < K * T; ++i) out.h.values()[i] = x(i);
  out.theta = theta;
  // evaluate directly from the definition
  const Eigen::VectorXd r = b - Ar * x;
  double e = 0.5 * r.squaredNorm() + 0.5 * (d.array() * x.array().square()).sum();
  if (p.temporal != TemporalMode::None) e += 0.5 * theta * T * (x - hp).squaredNorm();
  if (p.temporal == TemporalMode::Adaptive) e += 0.5 * T * (theta - p.theta_ref) * (theta - p.theta_ref);
  out.objective = e;
  return out;
}

}  // namespace autotrack::testing
