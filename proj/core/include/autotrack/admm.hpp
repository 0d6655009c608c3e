#pragma once

#include <vector>

#include "autotrack/tensor.hpp"

namespace autotrack {

struct StepSchedule {
  double gamma0 = 1.0;
  double beta = 10.0;
  double gamma_max = 10000.0;
};

/// How the temporal term enters the objective.
enum class TemporalMode {
  None,      // first frame: no previous filter
  Fixed,     // theta held at theta_ref (STRCF)
  Adaptive,  // theta optimized jointly around theta_ref
};

/// Filter training problem in the spectral domain (unnormalized DFT). The
/// model response is IDFT(sum_k x^k * conj(g^k)).
struct AdmmProblem {
  SpectralBank x_hat;
  Grid<Complex> y_hat;
  SpectralBank g_prev_hat;
  Grid<double> u_tilde;
  double theta_ref = 13.0;
  StepSchedule schedule;
  int iters = 4;
  TemporalMode temporal = TemporalMode::Adaptive;
};

struct AdmmSolution {
  SpectralBank g_hat;
  FeatureTensor h;
  double theta_opt = 0.0;
  /// Objective after each round, evaluated at the feasible point g = DFT(h).
  std::vector<double> objective_trace;
  /// ||g - DFT(h)|| / ||g|| after each round.
  std::vector<double> residual_trace;
};

/// Runs `iters` rounds of G -> H -> theta -> multiplier, starting from
/// g = g_prev, h = IDFT(g_prev), v = 0, gamma = gamma0, theta = theta_ref.
/// Throws Errc::AdmmDiverged (naming the round) on any non-finite iterate.
AdmmSolution solve(const AdmmProblem& p);

/// Per-pixel solve of (x x^H + (gamma + theta) I) g = rho with
/// rho = x conj(y) + theta g_prev - gamma v + gamma h_hat, via Sherman-Morrison.
SpectralBank update_g(const SpectralBank& x_hat, const Grid<Complex>& y_hat,
                      const SpectralBank& g_prev_hat, const SpectralBank& v_hat,
                      const SpectralBank& h_hat, double gamma, double theta);

/// h = gamma T (v + g) / (u^2 + gamma T), with v, g the spatial signals.
FeatureTensor update_h(const SpectralBank& g_hat, const SpectralBank& v_hat,
                       const Grid<double>& u_tilde, double gamma);

/// max(0, theta_ref - S / 2), S = sum |g - g_prev|^2 / T.
double update_theta(const SpectralBank& g_hat, const SpectralBank& g_prev_hat, double theta_ref);

/// Scaled-multiplier step: v += g - h_hat; gamma = min(gamma_max, beta gamma).
void update_multiplier(SpectralBank& v_hat, const SpectralBank& g_hat, const SpectralBank& h_hat,
                       double& gamma, const StepSchedule& schedule);

/// Training objective at filter h (with g = DFT(h)) and temporal weight theta:
///   1/2 sum_j |y_j - sum_k x_jk conj(g_jk)|^2 + 1/2 sum_k ||u . h^k||^2
///   + theta/2 sum_k ||g^k - g_prev^k||^2 + T/2 (theta - theta_ref)^2
/// with the temporal terms present as selected by p.temporal.
double objective(const AdmmProblem& p, const FeatureTensor& h, double theta);

/// Same objective given h and its spectrum (avoids a transform).
double objective(const AdmmProblem& p, const FeatureTensor& h, const SpectralBank& h_hat,
                 double theta);

/// Gaussian label centred at the map origin with circular distances.
Grid<double> gaussian_label(int rows, int cols, double sigma);

}  // namespace autotrack
