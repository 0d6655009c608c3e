#include "autotrack/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "autotrack/error.hpp"

namespace autotrack {

namespace {

// Portable draws: std distributions are implementation-defined, raw mt19937 is not.
class Rng {
 public:
  explicit Rng(uint32_t seed) : eng_(seed) {}
  double uniform() { return (eng_() >> 8) * (1.0 / 16777216.0); }
  double gaussian() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937 eng_;
};

/// Bilinearly interpolated random lattice.
class ValueNoise {
 public:
  ValueNoise(double width, double height, double spacing, Rng& rng) : spacing_(spacing) {
    cols_ = static_cast<int>(std::ceil(width / spacing)) + 2;
    rows_ = static_cast<int>(std::ceil(height / spacing)) + 2;
    values_.resize(static_cast<size_t>(rows_) * cols_);
    for (double& v : values_) v = rng.uniform();
  }

  double operator()(double x, double y) const {
    const double gx = std::clamp(x / spacing_, 0.0, cols_ - 1.000001);
    const double gy = std::clamp(y / spacing_, 0.0, rows_ - 1.000001);
    const int c = static_cast<int>(gx);
    const int r = static_cast<int>(gy);
    const double fx = gx - c;
    const double fy = gy - r;
    const double a = at(r, c) * (1 - fx) + at(r, c + 1) * fx;
    const double b = at(r + 1, c) * (1 - fx) + at(r + 1, c + 1) * fx;
    return a * (1 - fy) + b * fy;
  }

 private:
  double at(int r, int c) const { return values_[static_cast<size_t>(r) * cols_ + c]; }
  double spacing_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

uint8_t to_byte(double v) { return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); }

EventKind parse_kind(const std::string& s) {
  if (s == "illumination") return EventKind::Illumination;
  if (s == "occlusion") return EventKind::Occlusion;
  if (s == "noise") return EventKind::Noise;
  throw Error(Errc::ConfigInvalid, "unknown event type '" + s + "'");
}

std::string kind_name(EventKind k) {
  switch (k) {
    case EventKind::Illumination: return "illumination";
    case EventKind::Occlusion: return "occlusion";
    case EventKind::Noise: return "noise";
  }
  return "illumination";
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

BBox read_box(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(Errc::ConfigInvalid, "box needs 4 values");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Eigen::Vector3d read_vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(Errc::ConfigInvalid, "vector needs 3 values");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

BBox synthetic_box(const SyntheticMotion& m, int frame) {
  BBox b = m.start;
  b.x += m.velocity.x * frame;
  b.y += m.velocity.y * frame;
  if (m.type == "sine" && m.period > 0.0) {
    b.y += m.amplitude * std::sin(2.0 * std::numbers::pi * frame / m.period);
  }
  return b;
}

Sequence make_synthetic(const SyntheticSpec& spec) {
  if (spec.width < 1 || spec.height < 1 || spec.frames < 1) {
    throw Error(Errc::ConfigInvalid, "synthetic sequence needs positive size and length");
  }
  if (spec.motion.type != "linear" && spec.motion.type != "sine") {
    throw Error(Errc::ConfigInvalid, "unknown motion type '" + spec.motion.type + "'");
  }
  if (!spec.motion.start.valid()) throw Error(Errc::ConfigInvalid, "motion start box");

  Rng rng(spec.seed);
  const ValueNoise bg_coarse(spec.width, spec.height, 16.0, rng);
  const ValueNoise bg_fine(spec.width, spec.height, 3.0, rng);
  const ValueNoise obj(spec.motion.start.w, spec.motion.start.h, 4.0, rng);

  std::vector<double> background(static_cast<size_t>(spec.width) * spec.height);
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      background[static_cast<size_t>(r) * spec.width + c] =
          40.0 + 40.0 * bg_coarse(c + 0.5, r + 0.5) + 20.0 * bg_fine(c + 0.5, r + 0.5);
    }
  }

  Sequence seq;
  seq.name = spec.name;
  std::vector<double> img(background.size());
  for (int t = 0; t < spec.frames; ++t) {
    const BBox box = synthetic_box(spec.motion, t);
    seq.groundtruth.push_back(box);
    img = background;

    const int c0 = std::max(0, static_cast<int>(std::floor(box.x)));
    const int c1 = std::min(spec.width - 1, static_cast<int>(std::ceil(box.x + box.w)));
    const int r0 = std::max(0, static_cast<int>(std::floor(box.y)));
    const int r1 = std::min(spec.height - 1, static_cast<int>(std::ceil(box.y + box.h)));
    auto inside = [&box](double u, double v) { return u >= 0 && u < box.w && v >= 0 && v < box.h; };
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double u = c + 0.5 - box.x;
        const double v = r + 0.5 - box.y;
        if (inside(u, v)) img[static_cast<size_t>(r) * spec.width + c] = 60.0 + 80.0 * obj(u, v);
      }
    }

    for (const SyntheticEvent& e : spec.events) {
      if (t < e.start || t >= e.end) continue;
      switch (e.kind) {
        case EventKind::Illumination:
          for (double& p : img) p *= e.factor;
          break;
        case EventKind::Occlusion:
          for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
              const double u = c + 0.5 - box.x;
              const double v = r + 0.5 - box.y;
              if (inside(u, v) && u < e.coverage * box.w) {
                img[static_cast<size_t>(r) * spec.width + c] = 100.0;
              }
            }
          }
          break;
        case EventKind::Noise:
          for (double& p : img) p += e.sigma * rng.gaussian();
          break;
      }
    }

    Frame f(spec.width, spec.height, 1);
    auto px = f.pixels();
    for (size_t i = 0; i < img.size(); ++i) px[i] = to_byte(img[i]);
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

std::vector<SyntheticSpec> synthetic_suite() {
  SyntheticSpec plain;
  plain.name = "translate";
  plain.seed = 7;

  SyntheticSpec light = plain;
  light.name = "illumination";
  light.seed = 8;
  light.events.push_back({EventKind::Illumination, 50, 100, 1.8, 0.0, 0.0});

  SyntheticSpec occl = plain;
  occl.name = "occlusion";
  occl.seed = 9;
  occl.events.push_back({EventKind::Occlusion, 40, 70, 1.0, 0.5, 0.0});
  return {plain, light, occl};
}

SyntheticSpec parse_synthetic_spec(const nlohmann::json& j) {
  SyntheticSpec s;
  try {
    read_opt(j, "name", s.name);
    read_opt(j, "width", s.width);
    read_opt(j, "height", s.height);
    read_opt(j, "frames", s.frames);
    read_opt(j, "seed", s.seed);
    if (j.contains("motion")) {
      const auto& m = j.at("motion");
      read_opt(m, "type", s.motion.type);
      if (m.contains("start")) s.motion.start = read_box(m.at("start"));
      if (m.contains("velocity")) {
        const auto& v = m.at("velocity");
        s.motion.velocity = {v.at(0).get<double>(), v.at(1).get<double>()};
      }
      read_opt(m, "amplitude", s.motion.amplitude);
      read_opt(m, "period", s.motion.period);
    }
    if (j.contains("events")) {
      for (const auto& e : j.at("events")) {
        SyntheticEvent ev;
        ev.kind = parse_kind(e.at("type").get<std::string>());
        ev.start = e.at("start").get<int>();
        ev.end = e.contains("end") ? e.at("end").get<int>() : s.frames;
        read_opt(e, "factor", ev.factor);
        read_opt(e, "coverage", ev.coverage);
        read_opt(e, "sigma", ev.sigma);
        s.events.push_back(ev);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigInvalid, std::string("synthetic spec: ") + e.what());
  }
  return s;
}

nlohmann::json synthetic_spec_json(const SyntheticSpec& s) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : s.events) {
    events.push_back({{"type", kind_name(e.kind)},
                      {"start", e.start},
                      {"end", e.end},
                      {"factor", e.factor},
                      {"coverage", e.coverage},
                      {"sigma", e.sigma}});
  }
  const BBox& b = s.motion.start;
  return {{"name", s.name},
          {"width", s.width},
          {"height", s.height},
          {"frames", s.frames},
          {"seed", s.seed},
          {"motion",
           {{"type", s.motion.type},
            {"start", {b.x, b.y, b.w, b.h}},
            {"velocity", {s.motion.velocity.x, s.motion.velocity.y}},
            {"amplitude", s.motion.amplitude},
            {"period", s.motion.period}}},
          {"events", events}};
}

RigSequence make_rig(const RigSpec& spec) {
  check_non_symmetric(spec.points_world);
  Rng rng(spec.seed);
  const ValueNoise bg_coarse(spec.width, spec.height, 16.0, rng);
  const ValueNoise bg_fine(spec.width, spec.height, 3.0, rng);
  std::vector<ValueNoise> textures;
  for (int k = 0; k < 4; ++k) textures.emplace_back(spec.marker_size, spec.marker_size, 4.0, rng);

  RigSequence rig;
  rig.camera = spec.camera;
  rig.markers.points_world = spec.points_world;
  rig.sequence.name = spec.name;
  const double half = spec.marker_size / 2.0;

  for (int t = 0; t < spec.frames; ++t) {
    const Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    const Eigen::Vector3d tr = spec.t0 + spec.velocity * t;
    rig.rotations.push_back(R);
    rig.translations.push_back(tr);

    Frame f(spec.width, spec.height, 1);
    for (int r = 0; r < spec.height; ++r) {
      for (int c = 0; c < spec.width; ++c) {
        f.at(r, c) = to_byte(30.0 + 30.0 * bg_coarse(c + 0.5, r + 0.5) + 15.0 * bg_fine(c + 0.5, r + 0.5));
      }
    }
    for (int k = 0; k < 4; ++k) {
      const Eigen::Vector2d p = project(spec.camera, R * spec.points_world[k] + tr);
      const BBox box{p.x() - half, p.y() - half, double(spec.marker_size), double(spec.marker_size)};
      if (t == 0) rig.markers.init_boxes[k] = box;
      if (k == 0) rig.sequence.groundtruth.push_back(box);
      const int c0 = std::max(0, static_cast<int>(std::floor(box.x)));
      const int c1 = std::min(spec.width - 1, static_cast<int>(std::ceil(box.x + box.w)));
      const int r0 = std::max(0, static_cast<int>(std::floor(box.y)));
      const int r1 = std::min(spec.height - 1, static_cast<int>(std::ceil(box.y + box.h)));
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          const double u = c + 0.5 - box.x;
          const double v = r + 0.5 - box.y;
          if (u >= 0 && u < box.w && v >= 0 && v < box.h) {
            f.at(r, c) = to_byte(90.0 + 150.0 * textures[k](u, v));
          }
        }
      }
    }
    rig.sequence.frames.push_back(std::move(f));
  }
  return rig;
}

RigSpec parse_rig_spec(const nlohmann::json& j) {
  RigSpec s;
  try {
    read_opt(j, "name", s.name);
    read_opt(j, "width", s.width);
    read_opt(j, "height", s.height);
    read_opt(j, "frames", s.frames);
    read_opt(j, "seed", s.seed);
    read_opt(j, "marker_size", s.marker_size);
    if (j.contains("points_world")) {
      const auto& pts = j.at("points_world");
      if (!pts.is_array() || pts.size() != 4) throw Error(Errc::ConfigInvalid, "points_world needs 4 points");
      for (int i = 0; i < 4; ++i) s.points_world[i] = read_vec3(pts[i]);
    }
    if (j.contains("camera")) s.camera = parse_camera(j.at("camera"));
    if (j.contains("t0")) s.t0 = read_vec3(j.at("t0"));
    if (j.contains("velocity")) s.velocity = read_vec3(j.at("velocity"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigInvalid, std::string("rig spec: ") + e.what());
  }
  return s;
}

nlohmann::json rig_truth_json(const RigSequence& rig) {
  nlohmann::json frames = nlohmann::json::array();
  for (size_t i = 0; i < rig.rotations.size(); ++i) {
    std::vector<double> R;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) R.push_back(rig.rotations[i](r, c));
    }
    const auto& t = rig.translations[i];
    frames.push_back({{"frame", i}, {"R", R}, {"t", {t.x(), t.y(), t.z()}}});
  }
  return {{"frames", frames}};
}

}  // namespace autotrack
