#pragma once

#include <cstdint>

#include "autotrack/response.hpp"
#include "autotrack/tensor.hpp"

namespace autotrack {

enum class LogBase { Natural, Ten };

struct RegularizationParams {
  double delta = 0.2;   // weight of log(Pi + 1) inside the object crop
  double nu = 2e-5;     // scale of the global variation in the temporal reference
  double zeta = 13.0;   // temporal reference at zero variation
  double phi = 3000.0;  // learning stops above this global variation
  double u_min = 0.1;
  double u_slope = 3.0;
  LogBase log_base = LogBase::Natural;
};

/// Bowl-shaped spatial penalty and the object crop, both centred on the map.
struct BaseWeights {
  Grid<double> u_base;
  Grid<uint8_t> crop_mask;
};

struct TemporalReference {
  double theta_ref = 0.0;
  bool learn = true;
};

/// Per-frame regularization for one tracker.
struct RegularizationState {
  BaseWeights base;
  Grid<double> u_tilde;
  double theta_ref = 0.0;
  double theta_opt = 0.0;
  RegularizationParams params;
};

/// u_base = u_min + u_slope * ((di/h_o)^2 + (dj/w_o)^2), (di, dj) the circular
/// distance to (rows/2, cols/2); the crop mask is the centred h_o x w_o block.
BaseWeights build_base_weights(int rows, int cols, int object_rows, int object_cols,
                               double u_min = 0.1, double u_slope = 3.0);

/// u_tilde = mask * delta * log(pi + 1) + u_base.
Grid<double> spatial_regularizer(const VariationVector& pi, const BaseWeights& base,
                                 double delta, LogBase log_base = LogBase::Natural);

/// theta_ref = zeta / (1 + log(nu * norm + 1)); learn is false above phi.
TemporalReference temporal_reference(double global_norm, const RegularizationParams& params);

}  // namespace autotrack
