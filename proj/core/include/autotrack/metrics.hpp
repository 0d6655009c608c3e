#pragma once

#include <vector>

#include "autotrack/imaging.hpp"

namespace autotrack {

/// Precision thresholds 0..50 px step 1; success thresholds 0..1 step 0.02.
inline constexpr int kPrecisionSamples = 51;
inline constexpr int kSuccessSamples = 51;

inline double precision_threshold(int i) noexcept { return i; }
inline double success_threshold(int i) noexcept { return i * 0.02; }

/// Euclidean distance between box centres.
double center_error(const BBox& a, const BBox& b) noexcept;

/// Intersection over union; 0 for disjoint or empty boxes.
double iou(const BBox& a, const BBox& b) noexcept;

/// Per-frame errors with NaN where the ground truth is not a valid box.
struct FrameErrors {
  std::vector<double> center_errors;
  std::vector<double> overlaps;
};

FrameErrors frame_errors(const std::vector<BBox>& predicted, const std::vector<BBox>& groundtruth);

struct Curves {
  std::vector<double> precision;  // fraction with center error <= threshold
  std::vector<double> success;    // fraction with overlap > threshold
  int frames = 0;                 // frames that entered the curves
};

/// NaN entries are skipped. With no usable frames, both curves are zero.
Curves curves(const FrameErrors& e);

double precision_at(const Curves& c, int pixels = 20);

/// Mean of the success curve over thresholds in [0, 1).
double success_auc(const Curves& c);

}  // namespace autotrack
