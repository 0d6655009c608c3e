#include "autotrack/pose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>

#include <Eigen/Dense>

#include "autotrack/error.hpp"

namespace autotrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  if (angle < 1e-300) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

Eigen::Vector3d read_vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(Errc::ConfigInvalid, "points_world entry needs 3 values");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigInvalid, path.string() + ": " + e.what());
  }
}

// d(pixel)/d(camera point).
Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraIntrinsics& cam, const Eigen::Vector3d& p) {
  const double iz = 1.0 / p.z();
  const double x = p.x() * iz;
  const double y = p.y() * iz;
  const auto [k1, k2, p1, p2] = cam.dist;
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k1 * r2 + k2 * r2 * r2;
  const double dradial = k1 + 2.0 * k2 * r2;  // d(radial)/d(r2)

  Eigen::Matrix2d dd;
  dd(0, 0) = radial + 2.0 * x * x * dradial + 2.0 * p1 * y + 6.0 * p2 * x;
  dd(0, 1) = 2.0 * x * y * dradial + 2.0 * p1 * x + 2.0 * p2 * y;
  dd(1, 0) = 2.0 * x * y * dradial + 2.0 * p1 * x + 2.0 * p2 * y;
  dd(1, 1) = radial + 2.0 * y * y * dradial + 6.0 * p1 * y + 2.0 * p2 * x;

  Eigen::Matrix<double, 2, 3> dn;
  dn << iz, 0.0, -x * iz, 0.0, iz, -y * iz;
  Eigen::Matrix2d f = Eigen::Vector2d(cam.fx, cam.fy).asDiagonal();
  return f * dd * dn;
}

double cost_of(const Centers& c, const Permutation& perm, const MarkerConfig& m,
               const CameraIntrinsics& cam, const Eigen::Matrix3d& R, const Eigen::Vector3d& t) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d pc = R * m.points_world[perm[i]] + t;
    if (!(pc.z() > 1e-9)) return kInf;
    s += (project(cam, pc) - c[i]).squaredNorm();
  }
  return s;
}

std::optional<PoseEstimate> posit(const std::array<Eigen::Vector2d, 4>& xn,
                                  const std::array<Eigen::Vector3d, 4>& pw) {
  Eigen::Matrix3d A;
  for (int i = 1; i < 4; ++i) A.row(i - 1) = (pw[i] - pw[0]).transpose();
  Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::Matrix3d B = lu.inverse();

  Eigen::Vector3d eps = Eigen::Vector3d::Zero();
  Eigen::Vector3d ri, rj, rk;
  double z0 = 1.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::Vector3d xp, yp;
    for (int i = 1; i < 4; ++i) {
      xp(i - 1) = xn[i].x() * (1.0 + eps(i - 1)) - xn[0].x();
      yp(i - 1) = xn[i].y() * (1.0 + eps(i - 1)) - xn[0].y();
    }
    const Eigen::Vector3d I = B * xp;
    const Eigen::Vector3d J = B * yp;
    const double ni = I.norm();
    const double nj = J.norm();
    if (!(ni > 0.0) || !(nj > 0.0)) return std::nullopt;
    ri = I / ni;
    rj = J / nj;
    rk = ri.cross(rj);
    if (!(rk.norm() > 1e-12)) return std::nullopt;
    rk.normalize();
    z0 = 1.0 / std::sqrt(ni * nj);
    Eigen::Vector3d next;
    for (int i = 1; i < 4; ++i) next(i - 1) = (pw[i] - pw[0]).dot(rk) / z0;
    const double change = (next - eps).cwiseAbs().maxCoeff();
    eps = next;
    if (change < 1e-14) break;
  }
  Eigen::Matrix3d R;
  R.row(0) = ri.transpose();
  R.row(1) = rj.transpose();
  R.row(2) = rk.transpose();
  PoseEstimate p;
  p.rotation = nearest_rotation(R);
  p.translation = Eigen::Vector3d(xn[0].x() * z0, xn[0].y() * z0, z0) - p.rotation * pw[0];
  if (!p.translation.allFinite() || !p.rotation.allFinite()) return std::nullopt;
  return p;
}

std::optional<PoseEstimate> planar(const std::array<Eigen::Vector2d, 4>& xn,
                                   const std::array<Eigen::Vector3d, 4>& pw) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pw) c += p / 4.0;
  Eigen::Matrix<double, 4, 3> centered;
  for (int i = 0; i < 4; ++i) centered.row(i) = (pw[i] - c).transpose();
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(centered, Eigen::ComputeFullV);
  Eigen::Matrix3d E = svd.matrixV();
  if (E.determinant() < 0) E.col(2) = -E.col(2);

  Eigen::Matrix<double, 8, 9> M = Eigen::Matrix<double, 8, 9>::Zero();
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d q = E.transpose() * (pw[i] - c);
    const double a = q.x();
    const double b = q.y();
    const double x = xn[i].x();
    const double y = xn[i].y();
    M.row(2 * i) << a, b, 1, 0, 0, 0, -x * a, -x * b, -x;
    M.row(2 * i + 1) << 0, 0, 0, a, b, 1, -y * a, -y * b, -y;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> hs(M, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = hs.matrixV().col(8);
  Eigen::Matrix3d H;
  H << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const double n1 = H.col(0).norm();
  const double n2 = H.col(1).norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) return std::nullopt;
  double lambda = 2.0 / (n1 + n2);
  if (H(2, 2) * lambda < 0.0) lambda = -lambda;
  Eigen::Matrix3d Q;
  Q.col(0) = lambda * H.col(0);
  Q.col(1) = lambda * H.col(1);
  Q.col(2) = Q.col(0).cross(Q.col(1));
  const Eigen::Vector3d tp = lambda * H.col(2);

  PoseEstimate p;
  p.rotation = nearest_rotation(Q) * E.transpose();
  p.translation = tp - p.rotation * c;
  if (!p.translation.allFinite() || !p.rotation.allFinite()) return std::nullopt;
  return p;
}

}  // namespace

void check_non_symmetric(const std::array<Eigen::Vector3d, 4>& points) {
  double max_d = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) max_d = std::max(max_d, (points[i] - points[j]).norm());
  }
  if (!(max_d > 0.0)) throw Error(Errc::ConfigInvalid, "points_world: points coincide");
  const double tol = 1e-3 * max_d;
  Permutation perm = kIdentityPermutation;
  while (std::next_permutation(perm.begin(), perm.end())) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        const double a = (points[i] - points[j]).norm();
        const double b = (points[perm[i]] - points[perm[j]]).norm();
        worst = std::max(worst, std::abs(a - b));
      }
    }
    if (worst < tol) {
      throw Error(Errc::ConfigInvalid, "points_world: configuration is symmetric");
    }
  }
}

MarkerConfig parse_markers(const nlohmann::json& j) {
  MarkerConfig m;
  try {
    const auto& pts = j.at("points_world");
    const auto& boxes = j.at("init_boxes");
    if (!pts.is_array() || pts.size() != 4) throw Error(Errc::ConfigInvalid, "points_world needs 4 points");
    if (!boxes.is_array() || boxes.size() != 4) throw Error(Errc::ConfigInvalid, "init_boxes needs 4 boxes");
    for (int i = 0; i < 4; ++i) {
      m.points_world[i] = read_vec3(pts[i]);
      const auto& b = boxes[i];
      if (!b.is_array() || b.size() != 4) throw Error(Errc::ConfigInvalid, "init_boxes entry needs 4 values");
      m.init_boxes[i] = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
      if (!m.init_boxes[i].valid()) throw Error(Errc::ConfigInvalid, "init_boxes: invalid box");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigInvalid, std::string("markers: ") + e.what());
  }
  check_non_symmetric(m.points_world);
  return m;
}

CameraIntrinsics parse_camera(const nlohmann::json& j) {
  CameraIntrinsics c;
  try {
    c.fx = j.at("fx").get<double>();
    c.fy = j.at("fy").get<double>();
    c.cx = j.at("cx").get<double>();
    c.cy = j.at("cy").get<double>();
    if (j.contains("dist")) {
      const auto& d = j.at("dist");
      if (!d.is_array() || d.size() != 4) throw Error(Errc::ConfigInvalid, "dist needs 4 coefficients");
      for (int i = 0; i < 4; ++i) c.dist[i] = d[i].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigInvalid, std::string("camera: ") + e.what());
  }
  if (!(c.fx > 0.0)) throw Error(Errc::ConfigInvalid, "fx");
  if (!(c.fy > 0.0)) throw Error(Errc::ConfigInvalid, "fy");
  return c;
}

MarkerConfig load_markers(const std::filesystem::path& path) { return parse_markers(read_json(path)); }
CameraIntrinsics load_camera(const std::filesystem::path& path) { return parse_camera(read_json(path)); }

nlohmann::json markers_json(const MarkerConfig& m) {
  nlohmann::json pts = nlohmann::json::array();
  nlohmann::json boxes = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    const auto& p = m.points_world[i];
    const auto& b = m.init_boxes[i];
    pts.push_back({p.x(), p.y(), p.z()});
    boxes.push_back({b.x, b.y, b.w, b.h});
  }
  return {{"points_world", pts}, {"init_boxes", boxes}};
}

nlohmann::json camera_json(const CameraIntrinsics& c) {
  return {{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"dist", c.dist}};
}

Eigen::Vector2d project(const CameraIntrinsics& cam, const Eigen::Vector3d& p) {
  const double x = p.x() / p.z();
  const double y = p.y() / p.z();
  const auto [k1, k2, p1, p2] = cam.dist;
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k1 * r2 + k2 * r2 * r2;
  const double xd = x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x);
  const double yd = y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y;
  return {cam.fx * xd + cam.cx, cam.fy * yd + cam.cy};
}

Eigen::Vector2d normalize(const CameraIntrinsics& cam, const Eigen::Vector2d& px) {
  const double xd = (px.x() - cam.cx) / cam.fx;
  const double yd = (px.y() - cam.cy) / cam.fy;
  const auto [k1, k2, p1, p2] = cam.dist;
  double x = xd;
  double y = yd;
  for (int it = 0; it < 50; ++it) {
    const double r2 = x * x + y * y;
    const double radial = 1.0 + k1 * r2 + k2 * r2 * r2;
    const double tx = 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x);
    const double ty = p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y;
    x = (xd - tx) / radial;
    y = (yd - ty) / radial;
  }
  return {x, y};
}

double reprojection_rmse(const Centers& centers, const Permutation& perm, const MarkerConfig& m,
                         const CameraIntrinsics& cam, const Eigen::Matrix3d& R,
                         const Eigen::Vector3d& t) {
  return std::sqrt(cost_of(centers, perm, m, cam, R, t) / 4.0);
}

std::optional<PoseEstimate> initial_pose(const Centers& centers, const Permutation& perm,
                                         const MarkerConfig& m, const CameraIntrinsics& cam) {
  std::array<Eigen::Vector2d, 4> xn;
  std::array<Eigen::Vector3d, 4> pw;
  for (int i = 0; i < 4; ++i) {
    xn[i] = normalize(cam, centers[i]);
    pw[i] = m.points_world[perm[i]];
  }
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pw) c += p / 4.0;
  Eigen::Matrix<double, 4, 3> centered;
  for (int i = 0; i < 4; ++i) centered.row(i) = (pw[i] - c).transpose();
  const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>>(centered).singularValues();
  if (!(sv(0) > 0.0)) return std::nullopt;

  std::optional<PoseEstimate> p = sv(2) < 0.05 * sv(0) ? planar(xn, pw) : posit(xn, pw);
  if (!p) return std::nullopt;
  p->correspondence = perm;
  p->reprojection_rmse = reprojection_rmse(centers, perm, m, cam, p->rotation, p->translation);
  return p;
}

PoseEstimate refine_pose(const Centers& centers, const Permutation& perm, const MarkerConfig& m,
                         const CameraIntrinsics& cam, const PoseEstimate& init) {
  Eigen::Matrix3d R = init.rotation;
  Eigen::Vector3d t = init.translation;
  double cost = cost_of(centers, perm, m, cam, R, t);

  PoseEstimate out = init;
  out.correspondence = perm;
  out.iterations = 0;
  out.degenerate = false;
  if (!std::isfinite(cost)) {
    out.degenerate = true;
    out.reprojection_rmse = kInf;
    return out;
  }

  for (int it = 0; it < 50; ++it) {
    Eigen::Matrix<double, 8, 6> J;
    Eigen::Matrix<double, 8, 1> r;
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector3d rp = R * m.points_world[perm[i]];
      const Eigen::Vector3d pc = rp + t;
      const Eigen::Matrix<double, 2, 3> dp = projection_jacobian(cam, pc);
      J.block<2, 3>(2 * i, 0) = -dp * skew(rp);
      J.block<2, 3>(2 * i, 3) = dp;
      r.segment<2>(2 * i) = project(cam, pc) - centers[i];
    }
    const Eigen::Matrix<double, 6, 6> H = J.transpose() * J;
    const Eigen::Matrix<double, 6, 1> g = J.transpose() * r;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(H, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    if (!(lmax > 0.0) || lmin <= 1e-14 * lmax) {
      PoseEstimate flagged = init;
      flagged.correspondence = perm;
      flagged.degenerate = true;
      flagged.reprojection_rmse = reprojection_rmse(centers, perm, m, cam, init.rotation, init.translation);
      return flagged;
    }
    const Eigen::Matrix<double, 6, 1> step = -H.ldlt().solve(g);

    double alpha = 1.0;
    bool accepted = false;
    Eigen::Matrix3d R_new;
    Eigen::Vector3d t_new;
    double cost_new = cost;
    for (int halving = 0; halving < 40; ++halving) {
      R_new = exp_so3(alpha * step.head<3>()) * R;
      t_new = t + alpha * step.tail<3>();
      cost_new = cost_of(centers, perm, m, cam, R_new, t_new);
      if (cost_new <= cost) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    R = R_new;
    t = t_new;
    cost = cost_new;
    out.iterations = it + 1;
    if (alpha * step.norm() < 1e-10) break;
  }
  out.rotation = R;
  out.translation = t;
  out.reprojection_rmse = std::sqrt(cost / 4.0);
  return out;
}

CorrespondenceResult correspondence_search(const Centers& centers, const MarkerConfig& m,
                                           const CameraIntrinsics& cam,
                                           const std::optional<Permutation>& previous,
                                           double hysteresis) {
  std::optional<CorrespondenceResult> best;
  std::optional<PoseEstimate> prev_pose;
  Permutation perm = kIdentityPermutation;
  do {
    const std::optional<PoseEstimate> init = initial_pose(centers, perm, m, cam);
    if (!init) continue;
    const PoseEstimate refined = refine_pose(centers, perm, m, cam, *init);
    if (!std::isfinite(refined.reprojection_rmse)) continue;
    if (previous && perm == *previous) prev_pose = refined;
    if (!best || refined.reprojection_rmse < best->best_rmse) {
      best = CorrespondenceResult{perm, refined, refined.reprojection_rmse};
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  if (!best) throw Error(Errc::CorrespondenceFailed, "no assignment produced a pose");
  if (prev_pose && prev_pose->reprojection_rmse <= hysteresis * best->best_rmse) {
    return {*previous, *prev_pose, best->best_rmse};
  }
  return *best;
}

std::array<TrackState, 4> init_markers(const Frame& frame, const MarkerConfig& m,
                                       const TrackerConfig& cfg) {
  std::array<std::future<TrackStep>, 4> jobs;
  for (int i = 0; i < 4; ++i) {
    jobs[i] = std::async(std::launch::async, [&frame, &m, &cfg, i] {
      return init(frame, m.init_boxes[i], cfg);
    });
  }
  std::array<TrackState, 4> states;
  for (int i = 0; i < 4; ++i) states[i] = jobs[i].get().state;
  return states;
}

MarkerTrack track_markers(const Frame& frame, std::array<TrackState, 4>& states,
                          const TrackerConfig& cfg) {
  std::array<std::future<TrackStep>, 4> jobs;
  for (int i = 0; i < 4; ++i) {
    jobs[i] = std::async(std::launch::async, [&frame, &states, &cfg, i] {
      return update(frame, states[i], cfg);
    });
  }
  MarkerTrack out;
  for (int i = 0; i < 4; ++i) {
    try {
      TrackStep step = jobs[i].get();
      states[i] = std::move(step.state);
      out.reports[i] = std::move(step.report);
      out.ok[i] = true;
    } catch (const Error& e) {
      out.ok[i] = false;
      out.errors[i] = e.what();
    }
    const Vec2 c = states[i].bbox.center();
    out.centers[i] = {c.x, c.y};
  }
  return out;
}

std::vector<PoseFrame> run_pose(const Sequence& seq, const MarkerConfig& m,
                                const CameraIntrinsics& cam, const Config& cfg) {
  std::vector<PoseFrame> out;
  if (seq.size() == 0) return out;
  std::optional<Permutation> previous;
  std::array<TrackState, 4> states;
  for (size_t i = 0; i < seq.size(); ++i) {
    PoseFrame pf;
    pf.frame = static_cast<int>(i);
    try {
      const Frame frame = seq.frame(i);
      Centers centers;
      if (i == 0) {
        states = init_markers(frame, m, cfg.tracker);
        for (int k = 0; k < 4; ++k) {
          const Vec2 c = m.init_boxes[k].center();
          centers[k] = {c.x, c.y};
        }
      } else {
        const MarkerTrack tr = track_markers(frame, states, cfg.tracker);
        centers = tr.centers;
        if (!tr.all_ok()) {
          for (int k = 0; k < 4; ++k) {
            if (!tr.ok[k]) pf.error += "marker " + std::to_string(k) + ": " + tr.errors[k] + "; ";
          }
          out.push_back(pf);
          continue;
        }
      }
      const CorrespondenceResult cr = correspondence_search(
          centers, m, cam, previous, cfg.pose.correspondence_hysteresis);
      previous = cr.permutation;
      pf.pose = cr.pose;
      pf.valid = !cr.pose.degenerate;
      if (cr.pose.degenerate) pf.error = "refine-degenerate";
    } catch (const Error& e) {
      if (i == 0) throw;
      pf.error = e.what();
    }
    out.push_back(pf);
  }
  return out;
}

nlohmann::json pose_report_json(const std::vector<PoseFrame>& frames, const Config& cfg) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : frames) {
    nlohmann::json j = {{"frame", f.frame}, {"valid", f.valid}};
    if (!f.error.empty()) j["error"] = f.error;
    if (f.valid || f.pose.degenerate) {
      std::vector<double> R;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) R.push_back(f.pose.rotation(r, c));
      }
      j["R"] = R;
      j["t"] = {f.pose.translation.x(), f.pose.translation.y(), f.pose.translation.z()};
      j["rmse_px"] = f.pose.reprojection_rmse;
      j["permutation"] = f.pose.correspondence;
    }
    arr.push_back(j);
  }
  return {{"config", serialize_config(cfg)}, {"frames", arr}};
}

}  // namespace autotrack
