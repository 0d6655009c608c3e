#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "autotrack/config.hpp"
#include "autotrack/error.hpp"
#include "autotrack/ope.hpp"
#include "autotrack/pose.hpp"
#include "autotrack/sequence.hpp"
#include "autotrack/synthetic.hpp"

namespace fs = std::filesystem;

namespace autotrack::cli {

namespace {

struct BadArgs : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Config effective_config(const std::string& config_path, const std::string& variant) {
  Config cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!variant.empty()) cfg.tracker = configure_variant(cfg.tracker, parse_variant(variant));
  } catch (const Error& e) {
    throw BadArgs(e.what());
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw BadArgs("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw BadArgs(path.string() + ": " + e.what());
  }
}

std::string summary(const SequenceResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%s: frames=%zu precision@20=%.4f auc=%.4f mean_ce=%.2f fps=%.1f%s", r.name.c_str(),
                r.predictions.size(), r.precision20, r.auc, r.mean_center_error, r.fps,
                r.failed ? " FAILED" : "");
  return buf;
}

int write_synthetic(const nlohmann::json& spec, const fs::path& out_dir, std::ostream& out) {
  const std::string type = spec.value("type", std::string("sequence"));
  if (type == "rig") {
    const RigSequence rig = make_rig(parse_rig_spec(spec));
    const fs::path dir = out_dir / rig.sequence.name;
    write_sequence(rig.sequence, dir);
    write_file(dir / "markers.json", markers_json(rig.markers).dump(2) + "\n");
    write_file(dir / "camera.json", camera_json(rig.camera).dump(2) + "\n");
    write_file(dir / "poses.json", rig_truth_json(rig).dump(2) + "\n");
    out << "wrote " << dir.string() << "\n";
  } else if (type == "sequence") {
    const Sequence seq = make_synthetic(parse_synthetic_spec(spec));
    const fs::path dir = out_dir / seq.name;
    write_sequence(seq, dir);
    out << "wrote " << dir.string() << "\n";
  } else {
    throw BadArgs("unknown synthetic type '" + type + "'");
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlation-filter tracking, evaluation and marker pose estimation", "autotrack"};
  app.require_subcommand(1);

  std::string seq_dir, dataset_dir, spec_path, out_dir, markers_path, camera_path;
  std::string variant, config_path, trace_path, report_path, csv_path;

  auto* track = app.add_subcommand("track", "Track one sequence and print its OPE scores");
  track->add_option("seq-dir", seq_dir, "Sequence directory (img/ + groundtruth_rect.txt)")->required();
  track->add_option("--variant", variant, "autotrack | strcf | asr | atr")
      ->check(CLI::IsMember({"autotrack", "strcf", "asr", "atr"}));
  track->add_option("--config", config_path, "key=value config file");
  track->add_option("--trace", trace_path, "Per-frame trace (JSON lines)");

  auto* bench = app.add_subcommand("bench", "One-pass evaluation over a dataset directory");
  bench->add_option("dataset-dir", dataset_dir, "Directory of sequence directories")->required();
  bench->add_option("--report", report_path, "JSON report (default: stdout)");
  bench->add_option("--csv", csv_path, "Curves as CSV");
  bench->add_option("--variant", variant, "autotrack | strcf | asr | atr")
      ->check(CLI::IsMember({"autotrack", "strcf", "asr", "atr"}));
  bench->add_option("--config", config_path, "key=value config file");

  auto* synth = app.add_subcommand("synth", "Render synthetic sequences from a JSON spec");
  synth->add_option("spec", spec_path, "Spec file")->required();
  synth->add_option("out-dir", out_dir, "Output directory")->required();

  auto* pose = app.add_subcommand("pose", "Four-marker camera pose estimation");
  pose->add_option("seq-dir", seq_dir, "Sequence directory")->required();
  pose->add_option("markers", markers_path, "markers.json")->required();
  pose->add_option("camera", camera_path, "camera.json")->required();
  pose->add_option("--report", report_path, "JSON report (default: stdout)");
  pose->add_option("--config", config_path, "key=value config file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*track) {
      const Config cfg = effective_config(config_path, variant);
      const Sequence seq = load_sequence(seq_dir);
      const SequenceResult r = run_ope(seq, cfg.tracker);
      if (!trace_path.empty()) write_file(trace_path, trace_jsonl(r));
      out << summary(r) << "\n";
      for (const auto& f : r.failures) err << "  " << f << "\n";
      return r.failed ? 1 : 0;
    }
    if (*bench) {
      const Config cfg = effective_config(config_path, variant);
      const std::vector<Sequence> seqs = load_dataset(dataset_dir);
      if (seqs.empty()) throw BadArgs("no sequences in " + dataset_dir);
      const EvalReport rep = run_bench(seqs, cfg);
      const std::string json = report_json(rep).dump(2) + "\n";
      if (report_path.empty()) {
        out << json;
      } else {
        write_file(report_path, json);
        for (const auto& s : rep.sequences) out << summary(s) << "\n";
      }
      if (!csv_path.empty()) write_file(csv_path, report_csv(rep));
      return rep.any_failed ? 1 : 0;
    }
    if (*synth) {
      const nlohmann::json spec = read_json(spec_path);
      fs::create_directories(out_dir);
      if (spec.contains("sequences")) {
        for (const auto& s : spec.at("sequences")) write_synthetic(s, out_dir, out);
        return 0;
      }
      return write_synthetic(spec, out_dir, out);
    }
    if (*pose) {
      const Config cfg = effective_config(config_path, "");
      MarkerConfig markers;
      CameraIntrinsics cam;
      try {
        markers = load_markers(markers_path);
        cam = load_camera(camera_path);
      } catch (const Error& e) {
        throw BadArgs(e.what());
      }
      const Sequence seq = load_sequence(seq_dir);
      const std::vector<PoseFrame> frames = run_pose(seq, markers, cam, cfg);
      const std::string json = pose_report_json(frames, cfg).dump(2) + "\n";
      if (report_path.empty()) {
        out << json;
      } else {
        write_file(report_path, json);
      }
      bool ok = true;
      for (const auto& f : frames) {
        if (!f.valid) {
          ok = false;
          err << "frame " << f.frame << ": " << f.error << "\n";
        }
      }
      return ok ? 0 : 1;
    }
  } catch (const BadArgs& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace autotrack::cli
