#include "autotrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "autotrack/error.hpp"

namespace autotrack {

double center_error(const BBox& a, const BBox& b) noexcept {
  const Vec2 ca = a.center();
  const Vec2 cb = b.center();
  return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

double iou(const BBox& a, const BBox& b) noexcept {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

FrameErrors frame_errors(const std::vector<BBox>& predicted, const std::vector<BBox>& groundtruth) {
  if (predicted.size() != groundtruth.size()) {
    throw Error(Errc::GtLengthMismatch, "prediction and ground-truth lengths differ");
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  FrameErrors e;
  e.center_errors.reserve(predicted.size());
  e.overlaps.reserve(predicted.size());
  for (size_t i = 0; i < predicted.size(); ++i) {
    const BBox& gt = groundtruth[i];
    if (!gt.valid()) {
      e.center_errors.push_back(nan);
      e.overlaps.push_back(nan);
      continue;
    }
    const BBox& p = predicted[i];
    if (!p.valid()) {
      // lost prediction: counts as a miss at every threshold
      e.center_errors.push_back(std::numeric_limits<double>::infinity());
      e.overlaps.push_back(0.0);
      continue;
    }
    e.center_errors.push_back(center_error(p, gt));
    e.overlaps.push_back(iou(p, gt));
  }
  return e;
}

Curves curves(const FrameErrors& e) {
  Curves c;
  c.precision.assign(kPrecisionSamples, 0.0);
  c.success.assign(kSuccessSamples, 0.0);
  for (size_t i = 0; i < e.center_errors.size(); ++i) {
    const double ce = e.center_errors[i];
    const double ov = e.overlaps[i];
    if (std::isnan(ce) || std::isnan(ov)) continue;
    ++c.frames;
    for (int t = 0; t < kPrecisionSamples; ++t) {
      if (ce <= precision_threshold(t)) c.precision[t] += 1.0;
    }
    for (int t = 0; t < kSuccessSamples; ++t) {
      if (ov > success_threshold(t)) c.success[t] += 1.0;
    }
  }
  if (c.frames > 0) {
    for (double& v : c.precision) v /= c.frames;
    for (double& v : c.success) v /= c.frames;
  }
  return c;
}

double precision_at(const Curves& c, int pixels) {
  if (pixels < 0 || pixels >= kPrecisionSamples) {
    throw Error(Errc::InvalidArgument, "precision threshold out of range");
  }
  return c.precision[pixels];
}

double success_auc(const Curves& c) {
  double s = 0.0;
  for (int t = 0; t + 1 < kSuccessSamples; ++t) s += c.success[t];
  return s / (kSuccessSamples - 1);
}

}  // namespace autotrack
