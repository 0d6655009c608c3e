#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autotrack/config.hpp"
#include "autotrack/metrics.hpp"
#include "autotrack/sequence.hpp"

namespace autotrack {

struct FrameTrace {
  int frame = 0;
  BBox bbox;
  double pi_norm = 0.0;
  double theta = 0.0;
  bool learned = true;
  double spatial_boost = 0.0;  // not part of the JSONL trace
};

struct SequenceResult {
  std::string name;
  std::vector<BBox> predictions;
  FrameErrors errors;
  Curves curves;
  double precision20 = 0.0;
  double auc = 0.0;
  double mean_center_error = 0.0;
  double fps = 0.0;
  bool failed = false;
  std::vector<std::string> failures;  // "frame N: message"
  std::vector<FrameTrace> trace;
};

struct EvalReport {
  Config config;
  std::vector<SequenceResult> sequences;  // sorted by name
  Curves curves;                          // aggregate curves
  double precision20 = 0.0;
  double auc = 0.0;
  double fps = 0.0;
  bool any_failed = false;
};

/// One-pass evaluation: initialize on the first ground-truth box, then track
/// every later frame without re-initialization. Tracker errors on a frame are
/// recorded, the previous state is kept, and the sequence is marked failed.
/// fps counts tracker time only (no decode).
SequenceResult run_ope(const Sequence& seq, const TrackerConfig& cfg);

/// Aggregates per-sequence results. By default the aggregate curves are the
/// mean of the per-sequence curves; `bench.pool_frames` pools all frames.
EvalReport aggregate(std::vector<SequenceResult> results, const Config& cfg);

/// Evaluates the sequences on a worker pool; the result does not depend on
/// the thread count.
EvalReport run_bench(const std::vector<Sequence>& sequences, const Config& cfg);

nlohmann::json report_json(const EvalReport& report);
/// Columns: sequence,curve,threshold,value (curve = precision | success).
std::string report_csv(const EvalReport& report);
/// One {frame, bbox, pi_norm, theta, learned} object per line.
std::string trace_jsonl(const SequenceResult& result);

}  // namespace autotrack
