#include "stmos/geometry.hpp"

#include <cmath>
#include <string>

namespace stmos {

namespace {

void validate_pose_matrix(const Pose::Matrix4& m) {
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0)
    throw ArgumentError("pose bottom row must be exactly [0,0,0,1]");
  const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
  const double ortho_err = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(ortho_err < 1e-6))
    throw ArgumentError("pose rotation block is not orthonormal (|R'R - I|_max = " +
                        std::to_string(ortho_err) + ")");
  if (!(r.determinant() > 0.0))
    throw ArgumentError("pose rotation block must be proper (det(R) > 0)");
}

}  // namespace

Pose::Pose(const Matrix4& m) : m_(m) { validate_pose_matrix(m_); }

Pose Pose::from_translation(const Eigen::Vector3d& t) {
  Matrix4 m = Matrix4::Identity();
  m.topRightCorner<3, 1>() = t;
  return Pose(m);
}

Pose Pose::from_yaw(double yaw, const Eigen::Vector3d& t) {
  Eigen::Matrix3d r;
  const double c = std::cos(yaw), s = std::sin(yaw);
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return from_rotation_translation(r, t);
}

Pose Pose::from_rotation_translation(const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  Matrix4 m = Matrix4::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = t;
  return Pose(m);
}

Pose Pose::inverse() const {
  // Rigid inverse: [R t]^-1 = [R' -R't].
  Matrix4 m = Matrix4::Identity();
  const Eigen::Matrix3d rt = rotation().transpose();
  m.topLeftCorner<3, 3>() = rt;
  m.topRightCorner<3, 1>() = -rt * translation();
  return Pose(m);
}

Pose Pose::operator*(const Pose& rhs) const {
  Matrix4 m = m_ * rhs.m_;
  m.row(3) << 0.0, 0.0, 0.0, 1.0;  // keep the bottom row exact
  return Pose(m);
}

Eigen::Vector3d Pose::apply(const Eigen::Vector3d& p) const {
  return rotation() * p + translation();
}

Pose compose_to_current(std::span<const Pose> relative_poses, std::size_t j) {
  if (j > relative_poses.size())
    throw RangeError("compose_to_current: j = " + std::to_string(j) + " exceeds " +
                     std::to_string(relative_poses.size()) + " relative poses");
  Pose t;  // identity
  for (std::size_t m = 0; m < j; ++m) t = t * relative_poses[m];
  return t;
}

Scan transform_scan(const Scan& scan, const Pose& pose) {
  Scan out;
  out.points.reserve(scan.points.size());
  for (const auto& p : scan.points) out.points.push_back(pose.apply(p));
  out.labels = scan.labels;
  out.seq_index = scan.seq_index;
  return out;
}

std::vector<Scan> align_sequence(std::span<const Scan> scans,
                                 std::span<const Pose> relative_poses,
                                 bool use_poses) {
  if (!scans.empty() && relative_poses.size() != scans.size() - 1)
    throw ArgumentError("align_sequence: need exactly one relative pose per past scan (" +
                        std::to_string(scans.size()) + " scans, " +
                        std::to_string(relative_poses.size()) + " poses)");
  std::vector<Scan> out;
  out.reserve(scans.size());
  for (std::size_t j = 0; j < scans.size(); ++j) {
    if (use_poses) {
      out.push_back(transform_scan(scans[j], compose_to_current(relative_poses, j)));
    } else {
      out.push_back(scans[j]);
    }
    out.back().seq_index = static_cast<int>(j);
  }
  return out;
}

}  // namespace stmos
