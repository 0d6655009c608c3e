#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "autotrack/pose.hpp"
#include "autotrack/sequence.hpp"

namespace autotrack {

enum class EventKind {
  Illumination,  // every pixel scaled by `factor`
  Occlusion,     // flat strip over the left `coverage` fraction of the object
  Noise,         // full-frame Gaussian noise with std `sigma`
};

/// Active on frames [start, end).
struct SyntheticEvent {
  EventKind kind = EventKind::Illumination;
  int start = 0;
  int end = 0;
  double factor = 1.8;
  double coverage = 0.5;
  double sigma = 40.0;
};

struct SyntheticMotion {
  std::string type = "linear";  // linear | sine (vertical sine on top of the drift)
  BBox start{40.0, 100.0, 40.0, 40.0};
  Vec2 velocity{3.0, 0.0};  // px per frame
  double amplitude = 0.0;   // sine only, px
  double period = 50.0;     // sine only, frames
};

struct SyntheticSpec {
  std::string name = "synthetic";
  int width = 480;
  int height = 240;
  int frames = 100;
  uint32_t seed = 7;
  SyntheticMotion motion;
  std::vector<SyntheticEvent> events;
};

/// Object box on frame i.
BBox synthetic_box(const SyntheticMotion& motion, int frame);

/// Renders a textured rectangle over a static textured background. Base
/// intensities stay below 141, so a x1.8 illumination event does not clip.
Sequence make_synthetic(const SyntheticSpec& spec);

/// Translating square (3 px/frame, 100 frames) plain, with a x1.8
/// illumination change, and with a 50% occlusion.
std::vector<SyntheticSpec> synthetic_suite();

SyntheticSpec parse_synthetic_spec(const nlohmann::json& j);
nlohmann::json synthetic_spec_json(const SyntheticSpec& spec);

/// Camera moving in front of four markers (camera-from-world R = I, t varying).
struct RigSpec {
  std::string name = "rig";
  int width = 640;
  int height = 480;
  int frames = 40;
  uint32_t seed = 11;
  std::array<Eigen::Vector3d, 4> points_world{
      Eigen::Vector3d(-0.25, -0.25, 0.0), Eigen::Vector3d(0.25, -0.2, 0.05),
      Eigen::Vector3d(0.2, 0.25, 0.0), Eigen::Vector3d(-0.22, 0.2, 0.12)};
  CameraIntrinsics camera{800.0, 800.0, 320.0, 240.0, {0.0, 0.0, 0.0, 0.0}};
  Eigen::Vector3d t0{0.0, 0.0, 2.0};
  Eigen::Vector3d velocity{0.003, 0.002, 0.0};  // m per frame
  int marker_size = 28;                         // px
};

struct RigSequence {
  Sequence sequence;  // ground truth = marker 0 boxes
  MarkerConfig markers;
  CameraIntrinsics camera;
  std::vector<Eigen::Matrix3d> rotations;
  std::vector<Eigen::Vector3d> translations;
};

RigSequence make_rig(const RigSpec& spec);
RigSpec parse_rig_spec(const nlohmann::json& j);
/// Per-frame ground-truth poses in the pose-report layout.
nlohmann::json rig_truth_json(const RigSequence& rig);

}  // namespace autotrack
