#include "autotrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "autotrack/admm.hpp"
#include "autotrack/error.hpp"
#include "autotrack/features.hpp"
#include "autotrack/spectral.hpp"

namespace autotrack {

namespace {

// Temporal weight standing in for "infinite" in CeaseMode::Freeze.
constexpr double kFrozenTheta = 1e12;

int round_to_cells(double px, int cell_size, int max_px) {
  const int max_cells = std::max(2, max_px / cell_size);
  const int cells = std::clamp(static_cast<int>(std::lround(px / cell_size)), 2, max_cells);
  return cells * cell_size;
}

TrackGeometry make_geometry(const BBox& bbox, const TrackerConfig& cfg) {
  TrackGeometry g;
  g.target_size = {bbox.w, bbox.h};
  const double side = std::sqrt(cfg.padding);
  g.search_size = {bbox.w * side, bbox.h * side};
  const double fit =
      std::min(1.0, cfg.model_max_side / std::max(g.search_size.x, g.search_size.y));
  g.model_width = round_to_cells(g.search_size.x * fit, cfg.cell_size, cfg.model_max_side);
  g.model_height = round_to_cells(g.search_size.y * fit, cfg.cell_size, cfg.model_max_side);

  const int cols = g.model_width / cfg.cell_size;
  const int rows = g.model_height / cfg.cell_size;
  const double cells_per_px_x = static_cast<double>(cols) / g.search_size.x;
  const double cells_per_px_y = static_cast<double>(rows) / g.search_size.y;
  g.object_cols = std::clamp(static_cast<int>(std::lround(bbox.w * cells_per_px_x)), 1, cols);
  g.object_rows = std::clamp(static_cast<int>(std::lround(bbox.h * cells_per_px_y)), 1, rows);

  g.base = build_base_weights(rows, cols, g.object_rows, g.object_cols, cfg.u_min, cfg.u_slope);
  const double sigma = std::sqrt(static_cast<double>(g.object_rows) * g.object_cols) * cfg.label_sigma;
  g.y_hat = dft2(gaussian_label(rows, cols, sigma));
  return g;
}

bool intersects(const BBox& b, int width, int height) {
  return b.x < width && b.y < height && b.x + b.w > 0.0 && b.y + b.h > 0.0;
}

Vec2 clamp_center(Vec2 c, int width, int height) {
  return {std::clamp(c.x, 0.0, width - 1.0), std::clamp(c.y, 0.0, height - 1.0)};
}

AdmmProblem make_problem(SpectralBank x_hat, const TrackGeometry& g, const TrackerConfig& cfg) {
  AdmmProblem p;
  p.x_hat = std::move(x_hat);
  p.y_hat = g.y_hat;
  p.schedule = cfg.schedule();
  p.iters = cfg.admm_iters;
  return p;
}

}  // namespace

SpectralBank sample_spectrum(const Frame& frame, Vec2 center, double scale,
                             const TrackGeometry& geometry, const TrackerConfig& cfg) {
  const Vec2 size{geometry.search_size.x * scale, geometry.search_size.y * scale};
  const Frame patch =
      resize(extract_patch(frame, center, size), geometry.model_width, geometry.model_height);
  return dft2(apply_window(extract_features(patch, cfg.cell_size, cfg.features)));
}

TrackStep init(const Frame& frame, const BBox& bbox, const TrackerConfig& cfg) {
  if (frame.empty()) throw Error(Errc::FrameDegenerate, "empty first frame");
  if (!bbox.valid() || !intersects(bbox, frame.width(), frame.height())) {
    throw Error(Errc::InvalidInitBox, "box does not intersect the frame");
  }
  TrackStep step;
  TrackState& s = step.state;
  s.geometry = make_geometry(bbox, cfg);
  s.bbox = bbox;
  s.scale = 1.0;
  s.frame_width = frame.width();
  s.frame_height = frame.height();
  s.frame_idx = 0;

  AdmmProblem p = make_problem(sample_spectrum(frame, bbox.center(), 1.0, s.geometry, cfg),
                               s.geometry, cfg);
  p.u_tilde = s.geometry.base.u_base;
  p.temporal = TemporalMode::None;
  p.theta_ref = 0.0;
  AdmmSolution sol = solve(p);

  s.r_prev = detect(p.x_hat, sol.g_hat);
  s.g_prev_hat = std::move(sol.g_hat);
  s.theta_last = cfg.temporal_adaptive() ? cfg.zeta : cfg.theta_fixed;

  step.report.bbox = bbox;
  step.report.theta = s.theta_last;
  step.report.theta_ref = s.theta_last;
  step.report.learned = true;
  step.report.objective_trace = std::move(sol.objective_trace);
  return step;
}

TrackStep update(const Frame& frame, const TrackState& state, const TrackerConfig& cfg) {
  if (frame.empty() || frame.width() != state.frame_width || frame.height() != state.frame_height) {
    throw Error(Errc::FrameDegenerate, "frame geometry differs from the initial frame");
  }
  if (!state.r_prev) throw Error(Errc::InvalidArgument, "tracker state is not initialized");
  const TrackGeometry& geo = state.geometry;

  TrackStep step;
  TrackState& next = step.state;
  FrameReport& rep = step.report;
  next = state;
  next.frame_idx = state.frame_idx + 1;

  try {
    // Scale pyramid; the unit scale is undamped.
    const Vec2 center = state.bbox.center();
    std::optional<ResponseMap> best;
    double best_score = 0.0;
    double best_factor = 1.0;
    for (int i = 0; i < cfg.scales; ++i) {
      const double exponent = i - (cfg.scales - 1) / 2.0;
      const double factor = std::pow(cfg.scale_step, exponent);
      ResponseMap r =
          detect(sample_spectrum(frame, center, state.scale * factor, geo, cfg), state.g_prev_hat);
      const double score = r.peak_value * (exponent == 0.0 ? 1.0 : cfg.scale_damping);
      if (!best || score > best_score) {
        best_score = score;
        best_factor = factor;
        best = std::move(r);
      }
    }
    if (!std::isfinite(best->peak_value)) {
      throw Error(Errc::FrameDegenerate, "non-finite response");
    }

    const double scale = state.scale * best_factor;
    const SubcellOffset d = peak_displacement(*best);
    const double px_x = cfg.cell_size * geo.search_size.x * scale / geo.model_width;
    const double px_y = cfg.cell_size * geo.search_size.y * scale / geo.model_height;
    const Vec2 moved = clamp_center({center.x + d.dc * px_x, center.y + d.dr * px_y},
                                    frame.width(), frame.height());
    next.scale = scale;
    next.bbox = BBox::from_center(moved, geo.target_size.x * scale, geo.target_size.y * scale);

    const VariationVector pi = local_variation(*best, *state.r_prev);
    rep.pi_norm = pi.global_norm;

    AdmmProblem p;
    bool learn = true;
    if (cfg.temporal_adaptive()) {
      const TemporalReference ref = temporal_reference(pi.global_norm, cfg.regularization());
      learn = ref.learn;
      p.theta_ref = ref.theta_ref;
      p.temporal = TemporalMode::Adaptive;
    } else {
      p.theta_ref = cfg.theta_fixed;
      p.temporal = TemporalMode::Fixed;
    }
    rep.theta_ref = p.theta_ref;

    const bool freeze = !learn && cfg.cease_mode == CeaseMode::Freeze;
    if (learn || freeze) {
      AdmmProblem full = make_problem(sample_spectrum(frame, moved, scale, geo, cfg), geo, cfg);
      full.g_prev_hat = state.g_prev_hat;
      full.u_tilde = cfg.spatial_adaptive()
                         ? spatial_regularizer(pi, geo.base, cfg.delta, cfg.log_base)
                         : geo.base.u_base;
      full.theta_ref = freeze ? kFrozenTheta : p.theta_ref;
      full.temporal = freeze ? TemporalMode::Fixed : p.temporal;
      for (int j = 0; j < full.u_tilde.size(); ++j) {
        rep.spatial_boost = std::max(rep.spatial_boost,
                                     full.u_tilde.values()[j] - geo.base.u_base.values()[j]);
      }
      AdmmSolution sol = solve(full);
      next.g_prev_hat = std::move(sol.g_hat);
      rep.objective_trace = std::move(sol.objective_trace);
      if (!freeze) {
        next.theta_last = cfg.temporal_adaptive() ? sol.theta_opt : cfg.theta_fixed;
        next.r_prev = std::move(*best);
      }
    }
    rep.learned = learn;
    rep.theta = next.theta_last;
    rep.chosen_scale_factor = best_factor;
    rep.bbox = next.bbox;
  } catch (const Error& e) {
    if (e.code() == Errc::PatchTooSmall || e.code() == Errc::NonRealInverse) {
      throw Error(Errc::FrameDegenerate, e.what());
    }
    throw;
  }
  return step;
}

const FrameReport& Tracker::initialize(const Frame& frame, const BBox& bbox) {
  TrackStep step = init(frame, bbox, cfg_);
  state_ = std::move(step.state);
  report_ = std::move(step.report);
  return report_;
}

const FrameReport& Tracker::track(const Frame& frame) {
  TrackStep step = update(frame, state_, cfg_);
  state_ = std::move(step.state);
  report_ = std::move(step.report);
  return report_;
}

}  // namespace autotrack
