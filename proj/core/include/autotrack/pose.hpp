#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "autotrack/config.hpp"
#include "autotrack/sequence.hpp"
#include "autotrack/tracker.hpp"

namespace autotrack {

struct MarkerConfig {
  std::array<Eigen::Vector3d, 4> points_world;
  std::array<BBox, 4> init_boxes;
};

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  std::array<double, 4> dist{};  // k1, k2, p1, p2
};

/// correspondence[i] is the world point observed at image centre i.
using Permutation = std::array<int, 4>;
inline constexpr Permutation kIdentityPermutation{0, 1, 2, 3};

/// Camera-from-world pose: x_cam = R x_world + t.
struct PoseEstimate {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double reprojection_rmse = 0.0;
  Permutation correspondence = kIdentityPermutation;
  int iterations = 0;
  bool degenerate = false;  // refinement hit a singular system; pose is the initial one
};

using Centers = std::array<Eigen::Vector2d, 4>;

/// Throws Errc::ConfigInvalid when a nontrivial permutation of the points
/// preserves every pairwise distance (i.e. a rigid motion maps the set to itself).
void check_non_symmetric(const std::array<Eigen::Vector3d, 4>& points);

MarkerConfig parse_markers(const nlohmann::json& j);
CameraIntrinsics parse_camera(const nlohmann::json& j);
MarkerConfig load_markers(const std::filesystem::path& path);
CameraIntrinsics load_camera(const std::filesystem::path& path);
nlohmann::json markers_json(const MarkerConfig& m);
nlohmann::json camera_json(const CameraIntrinsics& c);

/// Pixel position of a camera-frame point (radial-tangential distortion).
Eigen::Vector2d project(const CameraIntrinsics& cam, const Eigen::Vector3d& p_cam);

/// Normalized, undistorted image coordinates of a pixel.
Eigen::Vector2d normalize(const CameraIntrinsics& cam, const Eigen::Vector2d& px);

/// Root-mean-square pixel error over the four markers; +inf if a point is
/// not in front of the camera.
double reprojection_rmse(const Centers& centers, const Permutation& perm, const MarkerConfig& m,
                         const CameraIntrinsics& cam, const Eigen::Matrix3d& R,
                         const Eigen::Vector3d& t);

/// Linear 4-point initial pose: scaled-orthographic iteration for spread-out
/// points, homography decomposition when the points are (nearly) coplanar.
/// Empty when the system is degenerate.
std::optional<PoseEstimate> initial_pose(const Centers& centers, const Permutation& perm,
                                         const MarkerConfig& m, const CameraIntrinsics& cam);

/// Gauss-Newton on the reprojection error with a left-composed axis-angle
/// rotation increment and additive translation. Step-halving keeps the cost
/// non-increasing. Stops at step norm < 1e-10 or 50 iterations.
PoseEstimate refine_pose(const Centers& centers, const Permutation& perm, const MarkerConfig& m,
                         const CameraIntrinsics& cam, const PoseEstimate& init);

struct CorrespondenceResult {
  Permutation permutation = kIdentityPermutation;
  PoseEstimate pose;  // refined pose for the chosen permutation
  double best_rmse = 0.0;
};

/// Scores all 24 assignments. When `previous` is given it is kept unless its
/// RMSE exceeds `hysteresis` times the best one. Throws
/// Errc::CorrespondenceFailed if no assignment yields a pose.
CorrespondenceResult correspondence_search(const Centers& centers, const MarkerConfig& m,
                                           const CameraIntrinsics& cam,
                                           const std::optional<Permutation>& previous = {},
                                           double hysteresis = 3.0);

struct MarkerTrack {
  Centers centers;
  std::array<bool, 4> ok{};
  std::array<std::string, 4> errors;
  std::array<FrameReport, 4> reports;
  bool all_ok() const noexcept { return ok[0] && ok[1] && ok[2] && ok[3]; }
};

/// Starts one tracker per marker from its initial box.
std::array<TrackState, 4> init_markers(const Frame& frame, const MarkerConfig& m,
                                       const TrackerConfig& cfg);

/// Advances the four trackers concurrently. A failing tracker keeps its
/// previous state and is flagged.
MarkerTrack track_markers(const Frame& frame, std::array<TrackState, 4>& states,
                          const TrackerConfig& cfg);

struct PoseFrame {
  int frame = 0;
  bool valid = false;
  PoseEstimate pose;
  std::string error;
};

/// Full localization-by-tracking loop over a sequence.
std::vector<PoseFrame> run_pose(const Sequence& seq, const MarkerConfig& m,
                                const CameraIntrinsics& cam, const Config& cfg);

/// {"config": ..., "frames": [{frame, R (row-major 9), t, rmse_px, permutation}]}.
nlohmann::json pose_report_json(const std::vector<PoseFrame>& frames, const Config& cfg);

}  // namespace autotrack
