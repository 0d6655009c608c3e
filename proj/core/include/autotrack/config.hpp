#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "autotrack/admm.hpp"
#include "autotrack/features.hpp"
#include "autotrack/regularization.hpp"

namespace autotrack {

enum class Variant { Strcf, Asr, Atr, AutoTrack };

/// What happens when the global variation exceeds phi.
enum class CeaseMode {
  Skip,    // no training; the previous filter is kept as is
  Freeze,  // train with an effectively infinite temporal penalty
};

struct TrackerConfig {
  double delta = 0.2;
  double nu = 2e-5;
  double zeta = 13.0;
  double phi = 3000.0;
  int admm_iters = 4;
  double gamma0 = 1.0;
  double beta = 10.0;
  double gamma_max = 10000.0;

  int cell_size = 4;
  double padding = 4.0;  // search-region area / object area
  int scales = 5;
  double scale_step = 1.01;
  double scale_damping = 0.99;
  int model_max_side = 200;

  double u_min = 0.1;
  double u_slope = 3.0;
  double label_sigma = 0.1;  // Gaussian sigma as a fraction of sqrt(object cells)
  double theta_fixed = 15.0;
  LogBase log_base = LogBase::Natural;
  CeaseMode cease_mode = CeaseMode::Skip;
  Variant variant = Variant::AutoTrack;
  FeatureOptions features;

  bool spatial_adaptive() const noexcept {
    return variant == Variant::Asr || variant == Variant::AutoTrack;
  }
  bool temporal_adaptive() const noexcept {
    return variant == Variant::Atr || variant == Variant::AutoTrack;
  }
  RegularizationParams regularization() const noexcept {
    return {delta, nu, zeta, phi, u_min, u_slope, log_base};
  }
  StepSchedule schedule() const noexcept { return {gamma0, beta, gamma_max}; }

  bool operator==(const TrackerConfig&) const = default;
};

struct BenchOptions {
  bool pool_frames = false;  // aggregate precision over frames instead of sequences
  int threads = 0;           // 0 = hardware concurrency

  bool operator==(const BenchOptions&) const = default;
};

struct PoseOptions {
  double correspondence_hysteresis = 3.0;

  bool operator==(const PoseOptions&) const = default;
};

struct Config {
  TrackerConfig tracker;
  BenchOptions bench;
  PoseOptions pose;

  bool operator==(const Config&) const = default;
};

/// STRCF: delta = 0, theta fixed. ASR: adaptive spatial term, theta fixed.
/// ATR: delta = 0, adaptive temporal term. AutoTrack: both.
TrackerConfig configure_variant(TrackerConfig cfg, Variant variant);

Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant v) noexcept;

/// Parses "key=value" lines ('#' starts a comment). Absent keys keep their
/// defaults. Throws Errc::ConfigUnknownKey or Errc::ConfigInvalid (naming the key).
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Every key, one per line, in a form parse_config reads back identically.
std::string serialize_config(const Config& cfg);

/// Throws Errc::ConfigInvalid naming the first out-of-range key.
void validate(const Config& cfg);

}  // namespace autotrack
