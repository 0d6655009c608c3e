#include "autotrack/ope.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <thread>

#include "autotrack/error.hpp"
#include "autotrack/tracker.hpp"

namespace autotrack {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

nlohmann::json box_json(const BBox& b) { return nlohmann::json::array({b.x, b.y, b.w, b.h}); }

void summarize(SequenceResult& r) {
  r.curves = curves(r.errors);
  r.precision20 = precision_at(r.curves, 20);
  r.auc = success_auc(r.curves);
  double sum = 0.0;
  int n = 0;
  for (double ce : r.errors.center_errors) {
    if (std::isnan(ce)) continue;
    sum += ce;
    ++n;
  }
  r.mean_center_error = n > 0 ? sum / n : 0.0;
}

}  // namespace

SequenceResult run_ope(const Sequence& seq, const TrackerConfig& cfg) {
  using clock = std::chrono::steady_clock;
  SequenceResult r;
  r.name = seq.name;
  const size_t n = seq.size();
  if (n == 0 || seq.groundtruth.size() != n) {
    throw Error(Errc::SequenceMalformed, "sequence '" + seq.name + "' is empty or inconsistent");
  }
  const BBox lost{std::nan(""), std::nan(""), std::nan(""), std::nan("")};
  r.predictions.assign(n, lost);

  clock::duration busy{};
  int processed = 0;
  Tracker tracker(cfg);
  bool initialized = false;
  for (size_t i = 0; i < n; ++i) {
    Frame frame;
    try {
      frame = seq.frame(i);
    } catch (const Error& e) {
      r.failed = true;
      r.failures.push_back("frame " + std::to_string(i) + ": " + e.what());
      if (initialized) r.predictions[i] = tracker.state().bbox;
      continue;
    }
    const auto t0 = clock::now();
    try {
      const FrameReport& rep = initialized ? tracker.track(frame)
                                           : tracker.initialize(frame, seq.groundtruth.front());
      busy += clock::now() - t0;
      ++processed;
      initialized = true;
      r.predictions[i] = rep.bbox;
      r.trace.push_back({static_cast<int>(i), rep.bbox, rep.pi_norm, rep.theta, rep.learned,
                         rep.spatial_boost});
    } catch (const Error& e) {
      busy += clock::now() - t0;
      r.failed = true;
      r.failures.push_back("frame " + std::to_string(i) + ": " + e.what());
      if (!initialized) break;
      r.predictions[i] = tracker.state().bbox;
    }
  }
  r.errors = frame_errors(r.predictions, seq.groundtruth);
  summarize(r);
  const double seconds = std::chrono::duration<double>(busy).count();
  r.fps = processed > 0 ? processed / std::max(seconds, 1e-9) : 0.0;
  return r;
}

EvalReport aggregate(std::vector<SequenceResult> results, const Config& cfg) {
  std::sort(results.begin(), results.end(),
            [](const SequenceResult& a, const SequenceResult& b) { return a.name < b.name; });
  EvalReport rep;
  rep.config = cfg;
  rep.sequences = std::move(results);
  rep.curves.precision.assign(kPrecisionSamples, 0.0);
  rep.curves.success.assign(kSuccessSamples, 0.0);

  if (cfg.bench.pool_frames) {
    FrameErrors pooled;
    for (const auto& s : rep.sequences) {
      pooled.center_errors.insert(pooled.center_errors.end(), s.errors.center_errors.begin(),
                                  s.errors.center_errors.end());
      pooled.overlaps.insert(pooled.overlaps.end(), s.errors.overlaps.begin(), s.errors.overlaps.end());
    }
    rep.curves = curves(pooled);
  } else if (!rep.sequences.empty()) {
    for (const auto& s : rep.sequences) {
      for (int t = 0; t < kPrecisionSamples; ++t) rep.curves.precision[t] += s.curves.precision[t];
      for (int t = 0; t < kSuccessSamples; ++t) rep.curves.success[t] += s.curves.success[t];
      rep.curves.frames += s.curves.frames;
    }
    const double m = static_cast<double>(rep.sequences.size());
    for (double& v : rep.curves.precision) v /= m;
    for (double& v : rep.curves.success) v /= m;
  }
  rep.precision20 = precision_at(rep.curves, 20);
  rep.auc = success_auc(rep.curves);

  double frames = 0.0;
  double seconds = 0.0;
  for (const auto& s : rep.sequences) {
    rep.any_failed = rep.any_failed || s.failed;
    if (s.fps > 0.0) {
      frames += s.trace.size();
      seconds += s.trace.size() / s.fps;
    }
  }
  rep.fps = seconds > 0.0 ? frames / seconds : 0.0;
  return rep;
}

EvalReport run_bench(const std::vector<Sequence>& sequences, const Config& cfg) {
  std::vector<SequenceResult> results(sequences.size());
  std::vector<std::string> errors(sequences.size());
  int threads = cfg.bench.threads > 0 ? cfg.bench.threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max<int>(1, static_cast<int>(sequences.size())));

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < sequences.size(); i = next++) {
      try {
        results[i] = run_ope(sequences[i], cfg.tracker);
      } catch (const std::exception& e) {
        results[i].name = sequences[i].name;
        results[i].failed = true;
        results[i].failures.push_back(e.what());
        results[i].errors = frame_errors(std::vector<BBox>(sequences[i].groundtruth.size()),
                                         sequences[i].groundtruth);
        summarize(results[i]);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return aggregate(std::move(results), cfg);
}

nlohmann::json report_json(const EvalReport& report) {
  using nlohmann::json;
  json seqs = json::array();
  for (const auto& s : report.sequences) {
    seqs.push_back({
        {"name", s.name},
        {"frames", s.predictions.size()},
        {"precision20", s.precision20},
        {"auc", s.auc},
        {"mean_center_error", s.mean_center_error},
        {"fps", s.fps},
        {"failed", s.failed},
        {"failures", s.failures},
        {"precision_curve", s.curves.precision},
        {"success_curve", s.curves.success},
    });
  }
  return {
      {"config", serialize_config(report.config)},
      {"sequences", seqs},
      {"aggregate",
       {
           {"precision20", report.precision20},
           {"auc", report.auc},
           {"fps", report.fps},
           {"pooled_frames", report.config.bench.pool_frames},
           {"precision_curve", report.curves.precision},
           {"success_curve", report.curves.success},
       }},
      {"failed", report.any_failed},
  };
}

std::string report_csv(const EvalReport& report) {
  std::string out = "sequence,curve,threshold,value\n";
  auto emit = [&out](const std::string& name, const Curves& c) {
    for (int t = 0; t < kPrecisionSamples; ++t) {
      out += name + ",precision," + format_number(precision_threshold(t)) + "," +
             format_number(c.precision[t]) + "\n";
    }
    for (int t = 0; t < kSuccessSamples; ++t) {
      out += name + ",success," + format_number(success_threshold(t)) + "," +
             format_number(c.success[t]) + "\n";
    }
  };
  for (const auto& s : report.sequences) emit(s.name, s.curves);
  emit("aggregate", report.curves);
  return out;
}

std::string trace_jsonl(const SequenceResult& result) {
  std::string out;
  for (const auto& f : result.trace) {
    const nlohmann::json line = {{"frame", f.frame},
                                 {"bbox", box_json(f.bbox)},
                                 {"pi_norm", f.pi_norm},
                                 {"theta", f.theta},
                                 {"learned", f.learned}};
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace autotrack
