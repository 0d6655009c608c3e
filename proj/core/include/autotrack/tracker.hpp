#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "autotrack/config.hpp"
#include "autotrack/imaging.hpp"
#include "autotrack/regularization.hpp"
#include "autotrack/response.hpp"
#include "autotrack/tensor.hpp"

namespace autotrack {

/// Fixed per-target sampling geometry, decided on the first frame.
struct TrackGeometry {
  Vec2 target_size;      // object size in image px at scale 1
  Vec2 search_size;      // search region in image px at scale 1
  int model_width = 0;   // resampled patch size in px (multiple of cell_size)
  int model_height = 0;
  int object_rows = 0;   // object extent in feature cells
  int object_cols = 0;
  BaseWeights base;
  Grid<Complex> y_hat;
};

struct TrackState {
  BBox bbox;
  double scale = 1.0;
  SpectralBank g_prev_hat;
  std::optional<ResponseMap> r_prev;
  double theta_last = 0.0;
  int frame_idx = 0;
  int frame_width = 0;
  int frame_height = 0;
  TrackGeometry geometry;
};

/// Per-frame diagnostics.
struct FrameReport {
  BBox bbox;
  double pi_norm = 0.0;
  double theta = 0.0;
  double theta_ref = 0.0;
  double spatial_boost = 0.0;  // max of u_tilde - u_base used in training
  bool learned = true;
  double chosen_scale_factor = 1.0;
  std::vector<double> objective_trace;
};

struct TrackStep {
  TrackState state;
  FrameReport report;
};

/// Trains the first filter (no temporal term, u = u_base).
/// Throws Errc::InvalidInitBox when the box does not intersect the frame.
TrackStep init(const Frame& frame, const BBox& bbox, const TrackerConfig& cfg);

/// Detect over the scale pyramid, move the box, measure response variation,
/// and train (unless learning is suspended). The input state is not modified;
/// on Errc::FrameDegenerate the caller keeps the old state.
TrackStep update(const Frame& frame, const TrackState& state, const TrackerConfig& cfg);

/// Windowed feature spectrum of the search region around `center` at `scale`.
SpectralBank sample_spectrum(const Frame& frame, Vec2 center, double scale,
                             const TrackGeometry& geometry, const TrackerConfig& cfg);

/// Convenience holder for the functional API.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) {}

  const FrameReport& initialize(const Frame& frame, const BBox& bbox);
  const FrameReport& track(const Frame& frame);

  const TrackState& state() const noexcept { return state_; }
  const FrameReport& last_report() const noexcept { return report_; }
  const TrackerConfig& config() const noexcept { return cfg_; }

 private:
  TrackerConfig cfg_;
  TrackState state_;
  FrameReport report_;
};

}  // namespace autotrack
