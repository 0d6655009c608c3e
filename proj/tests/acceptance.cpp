// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "autotrack/admm.hpp"
#include "autotrack/ope.hpp"
#include "autotrack/pose.hpp"
#include "autotrack/regularization.hpp"
#include "autotrack/spectral.hpp"
#include "autotrack/synthetic.hpp"
#include "autotrack/tracker.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace autotrack;
using namespace autotrack::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome solver_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> side(4, 16);
  std::uniform_real_distribution<double> pos(0.1, 100.0), uw(0.1, 5.0);
  const int ks[] = {1, 2, 3, 8};
  double worst_g = 0.0, worst_h = 0.0, worst_theta = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int rows = side(rng), cols = side(rng), K = ks[t % 4];
    const SpectralBank x = random_bank(rows, cols, K, rng), gp = random_bank(rows, cols, K, rng),
                       v = random_bank(rows, cols, K, rng), hh = random_bank(rows, cols, K, rng);
    const Grid<Complex> y = random_complex_grid(rows, cols, rng);
    const double gamma = pos(rng), theta = pos(rng);
    worst_g = std::max(worst_g, max_rel_diff(update_g(x, y, gp, v, hh, gamma, theta),
                                             dense_update_g(x, y, gp, v, hh, gamma, theta)));

    const SpectralBank gs = dft2(random_tensor(rows, cols, K, rng));
    const SpectralBank vs = dft2(random_tensor(rows, cols, K, rng));
    Grid<double> u(rows, cols);
    for (double& w : u.values()) w = uw(rng);
    const double gh = 0.5 + t % 7;
    worst_h = std::max(worst_h, h_stationarity(update_h(gs, vs, u, gh), gs, vs, u, gh));

    const SpectralBank g1 = dft2(random_tensor(rows, cols, K, rng, 0.3));
    const SpectralBank g0 = dft2(random_tensor(rows, cols, K, rng, 0.3));
    double S = 0.0;
    for (size_t i = 0; i < g1.values().size(); ++i) S += std::norm(g1.values()[i] - g0.values()[i]);
    S /= rows * cols;
    worst_theta =
        std::max(worst_theta, std::abs(update_theta(g1, g0, 13.0) - theta_grid_search(S, 13.0)));
  }
  const double secs = seconds_since(t0);
  return {worst_g < 1e-10 && worst_h < 1e-6 && worst_theta <= 1e-4 && secs < 10.0,
          fmt("update_g rel %.2e, update_h grad %.2e, theta %.2e, %.2fs", worst_g, worst_h,
              worst_theta, secs)};
}

Outcome admm_monotone() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> side(4, 16);
  const int ks[] = {1, 2, 3, 8};
  double worst_rise = -INFINITY, worst_res = 0.0;
  for (int t = 0; t < 20; ++t) {
    const AdmmProblem p = random_problem(side(rng), side(rng), ks[t % 4], rng);
    const AdmmSolution s = solve(p);
    for (size_t i = 1; i < s.objective_trace.size(); ++i) {
      worst_rise = std::max(worst_rise, (s.objective_trace[i] - s.objective_trace[i - 1]) /
                                            std::abs(s.objective_trace[i - 1]));
    }
    worst_res = std::max(worst_res, s.residual_trace.back());
  }
  return {worst_rise <= 1e-9 && worst_res < 1e-2,
          fmt("largest relative rise %.2e, final residual %.2e", worst_rise, worst_res)};
}

Outcome joint_optimum() {
  std::mt19937_64 rng(303);
  double worst = 0.0, worst_paper = 0.0;
  for (int t = 0; t < 10; ++t) {
    AdmmProblem p = random_problem(4, 4, 2, rng);
    p.iters = 100;
    const DenseOptimum d = dense_joint_optimum(p);
    const AdmmSolution paper = solve(p);
    worst_paper = std::max(worst_paper,
                           std::abs(objective(p, paper.h, paper.theta_opt) - d.objective) / d.objective);
    p.schedule.gamma_max = 100.0;
    const AdmmSolution s = solve(p);
    worst = std::max(worst, std::abs(objective(p, s.h, s.theta_opt) - d.objective) / d.objective);
  }
  return {worst <= 1e-6, fmt("relative objective gap %.2e (gamma_max 100); %.2e with gamma_max 1e4",
                             worst, worst_paper)};
}

Outcome regularization_behavior() {
  const BaseWeights b = build_base_weights(50, 50, 20, 20);
  VariationVector zero;
  zero.pi = Grid<double>(50, 50, 0.0);
  const bool base_exact = spatial_regularizer(zero, b, 0.2) == b.u_base;
  const TemporalReference ref = temporal_reference(0.0, RegularizationParams{});

  SyntheticSpec spec = synthetic_suite()[0];
  spec.frames = 2;
  const Sequence seq = make_synthetic(spec);
  const TrackerConfig cfg;
  TrackState s0 = init(seq.frames[0], seq.groundtruth[0], cfg).state;
  Grid<double> tiny = s0.r_prev->values;
  for (double& v : tiny.values()) v *= 1e-4;
  s0.r_prev = make_response(std::move(tiny));
  const TrackStep s1 = update(seq.frames[1], s0, cfg);
  const bool frozen = s1.report.pi_norm > 3000.0 && !s1.report.learned &&
                      s1.state.g_prev_hat == s0.g_prev_hat;
  return {base_exact && ref.theta_ref == 13.0 && ref.learn && frozen,
          fmt("u=u_base %s, theta_ref %.6g, |Pi| %.4g -> learned %d, filter %s", base_exact ? "yes" : "no",
              ref.theta_ref, s1.report.pi_norm, int(s1.report.learned),
              s1.state.g_prev_hat == s0.g_prev_hat ? "bitwise unchanged" : "changed")};
}

Outcome spectral_layer() {
  std::mt19937_64 rng(505);
  double rt = 0.0, pars = 0.0, conv = 0.0, naive = 0.0;
  const int sizes[][2] = {{1, 1}, {2, 3}, {8, 8}, {7, 13}, {16, 16}, {31, 64}, {64, 64}};
  for (const auto& sz : sizes) {
    const FeatureTensor x = random_tensor(sz[0], sz[1], 3, rng);
    const FeatureTensor back = idft2_real(dft2(x));
    double sx = 0.0;
    for (size_t i = 0; i < x.values().size(); ++i) {
      rt = std::max(rt, std::abs(back.values()[i] - x.values()[i]));
      sx += x.values()[i] * x.values()[i];
    }
    pars = std::max(pars, std::abs(parseval_norm(dft2(x)) / (sz[0] * sz[1]) - sx) / sx);
  }
  for (const auto& sz : {std::pair{8, 8}, std::pair{5, 12}, std::pair{16, 16}}) {
    const FeatureTensor z = random_tensor(sz.first, sz.second, 2, rng);
    const FeatureTensor g = random_tensor(sz.first, sz.second, 2, rng);
    const SpectralBank zh = dft2(z), gh = dft2(g);
    Grid<Complex> prod(sz.first, sz.second);
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < prod.size(); ++j) prod.values()[j] += zh.channel(k)[j] * std::conj(gh.channel(k)[j]);
    }
    const Grid<double> fast = idft2_real(prod);
    const Grid<double> slow = spatial_correlation(z, g);
    double m = 0.0;
    for (double v : slow.values()) m = std::max(m, std::abs(v));
    for (int j = 0; j < fast.size(); ++j) conv = std::max(conv, std::abs(fast.values()[j] - slow.values()[j]) / m);
  }
  const Grid<double> x8 = random_grid(8, 8, rng);
  const Grid<Complex> fast = dft2(x8), slow = naive_dft2(to_complex(x8));
  double m = 0.0;
  for (const Complex& c : slow.values()) m = std::max(m, std::abs(c));
  for (int j = 0; j < 64; ++j) naive = std::max(naive, std::abs(fast.values()[j] - slow.values()[j]) / m);
  return {rt <= 1e-10 && pars <= 1e-10 && conv <= 1e-10 && naive <= 1e-10,
          fmt("round trip %.2e, Parseval %.2e, correlation %.2e, naive DFT %.2e", rt, pars, conv, naive)};
}

Outcome desk_tracking() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  double ce_full = 0.0, ce_strcf = 0.0;
  for (const SyntheticSpec& spec : synthetic_suite()) {
    const Sequence seq = make_synthetic(spec);
    const SequenceResult full = run_ope(seq, configure_variant(TrackerConfig{}, Variant::AutoTrack));
    ok = ok && !full.failed && full.precision20 >= 0.95;
    detail += fmt("%s P20 %.3f; ", spec.name.c_str(), full.precision20);
    if (spec.name == "occlusion") {
      ce_full = full.mean_center_error;
      ce_strcf = run_ope(seq, configure_variant(TrackerConfig{}, Variant::Strcf)).mean_center_error;
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && ce_full <= ce_strcf && secs < 60.0;
  return {ok, detail + fmt("occlusion mean CE autotrack %.3f vs strcf %.3f; %.1fs", ce_full, ce_strcf, secs)};
}

Outcome variant_wiring() {
  const Sequence seq = make_synthetic(synthetic_suite()[2]);
  auto trace = [&](Variant v) { return run_ope(seq, configure_variant(TrackerConfig{}, v)).trace; };
  const auto strcf = trace(Variant::Strcf), asr = trace(Variant::Asr), atr = trace(Variant::Atr),
             full = trace(Variant::AutoTrack);
  bool strcf_ok = true, asr_fixed = true, atr_flat = true;
  int asr_boosted = 0, atr_adapted = 0, full_boosted = 0, full_adapted = 0;
  for (size_t i = 1; i < strcf.size(); ++i) {
    strcf_ok = strcf_ok && strcf[i].theta == 15.0 && strcf[i].spatial_boost == 0.0;
    asr_fixed = asr_fixed && asr[i].theta == 15.0;
    asr_boosted += asr[i].spatial_boost > 0.0;
    atr_flat = atr_flat && atr[i].spatial_boost == 0.0;
    atr_adapted += atr[i].theta != 15.0;
    full_boosted += full[i].spatial_boost > 0.0;
    full_adapted += full[i].theta != 15.0;
  }
  const int n = static_cast<int>(strcf.size()) - 1;
  const bool ok = strcf_ok && asr_fixed && asr_boosted == n && atr_flat && atr_adapted == n &&
                  full_boosted == n && full_adapted == n;
  return {ok, fmt("strcf theta=15 %s; asr theta=15 %s, spatial on %d/%d; atr spatial off %s, theta "
                  "adapted %d/%d; autotrack %d/%d, %d/%d",
                  strcf_ok ? "yes" : "no", asr_fixed ? "yes" : "no", asr_boosted, n,
                  atr_flat ? "yes" : "no", atr_adapted, n, full_boosted, n, full_adapted, n)};
}

Outcome throughput() {
  SyntheticSpec spec;
  spec.name = "throughput";
  spec.width = 640;
  spec.height = 360;
  spec.frames = 40;
  spec.motion.start = {100.0, 120.0, 100.0, 100.0};
  spec.motion.velocity = {3.0, 1.0};
  const Sequence seq = make_synthetic(spec);
  const TrackerConfig cfg;
  const TrackStep first = init(seq.frames[0], seq.groundtruth[0], cfg);
  const auto& g = first.state.geometry;
  const SequenceResult r = run_ope(seq, cfg);
  const bool shape = g.model_width == 200 && g.model_height == 200 && first.state.g_prev_hat.channels() == 32;
  return {shape && r.fps >= 15.0, fmt("%.1f fps on a %dx%d px model with %d channels", r.fps,
                                      g.model_width, g.model_height, first.state.g_prev_hat.channels())};
}

Outcome pose_pipeline() {
  const auto t0 = std::chrono::steady_clock::now();
  MarkerConfig m;
  m.points_world = RigSpec{}.points_world;
  const CameraIntrinsics cam = RigSpec{}.camera;
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> a(-0.5, 0.5), off(-0.2, 0.2);
  std::normal_distribution<double> noise(0.0, 0.5);
  double worst_t = 0.0, worst_r = 0.0, err = 0.0;
  int perm_ok = 0, noisy_perm_ok = 0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Matrix3d R =
        Eigen::AngleAxisd(a(rng), Eigen::Vector3d(a(rng), a(rng), a(rng)).normalized()).toRotationMatrix();
    const Eigen::Vector3d tr(off(rng), off(rng), 2.0);
    Permutation perm = kIdentityPermutation;
    std::shuffle(perm.begin(), perm.end(), rng);
    Centers c;
    for (int i = 0; i < 4; ++i) c[i] = project(cam, R * m.points_world[perm[i]] + tr);
    if (t < 100) {
      const CorrespondenceResult r = correspondence_search(c, m, cam);
      perm_ok += r.permutation == perm;
      worst_t = std::max(worst_t, (r.pose.translation - tr).norm());
      worst_r = std::max(worst_r, Eigen::AngleAxisd(r.pose.rotation.transpose() * R).angle());
    } else {
      for (auto& v : c) v += Eigen::Vector2d(noise(rng), noise(rng));
      const CorrespondenceResult r = correspondence_search(c, m, cam);
      noisy_perm_ok += r.permutation == perm;
      err += (r.pose.translation - tr).norm();
    }
  }
  err /= 100.0;
  const double secs = seconds_since(t0);
  return {perm_ok == 100 && worst_t < 1e-6 && worst_r < 1e-6 && err < 0.02 && secs < 30.0,
          fmt("noiseless perm %d/100, t %.2e m, R %.2e rad; 0.5px: mean |dt| %.2f cm, perm %d/100; %.1fs",
              perm_ok, worst_t, worst_r, err * 100.0, noisy_perm_ok, secs)};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("autotrack_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const SyntheticSpec& spec : synthetic_suite()) write_sequence(make_synthetic(spec), dir / "suite" / spec.name);
  auto bench = [&](const std::string& out) {
    std::ostringstream o, e;
    const int code = cli::run({"bench", (dir / "suite").string(), "--report", (dir / out).string()}, o, e);
    std::ifstream in(dir / out);
    nlohmann::json j = nlohmann::json::parse(in);
    j["aggregate"].erase("fps");
    for (auto& s : j["sequences"]) s.erase("fps");
    return std::pair{code, j.dump(2)};
  };
  const auto [c1, a] = bench("a.json");
  const auto [c2, b] = bench("b.json");
  fs::remove_all(dir);
  return {c1 == 0 && c2 == 0 && a == b,
          fmt("exit codes %d/%d, reports %s (%zu bytes without fps)", c1, c2,
              a == b ? "identical" : "differ", a.size())};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"solver-oracle equivalence", solver_oracles},
      {"ADMM monotonicity", admm_monotone},
      {"joint-optimum equivalence", joint_optimum},
      {"regularization behavior", regularization_behavior},
      {"spectral layer", spectral_layer},
      {"desk-scale tracking", desk_tracking},
      {"variant wiring", variant_wiring},
      {"throughput", throughput},
      {"pose pipeline", pose_pipeline},
      {"determinism", determinism},
  };
  int failed = 0;
  int idx = 1;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %s: %s (%s)\n", idx++, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
