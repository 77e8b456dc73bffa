#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "stmos/errors.hpp"

namespace stmos {

/// Per-point ground-truth / predicted class.
enum class PointClass : std::uint8_t { Static = 0, Moving = 1, Ignore = 2 };

/// Rigid-body transform as a validated 4x4 homogeneous matrix (row-major
/// storage, double precision). Rotation block must be orthonormal to 1e-6
/// and proper (det > 0); bottom row must be exactly [0,0,0,1].
class Pose {
 public:
  using Matrix4 = Eigen::Matrix<double, 4, 4, Eigen::RowMajor>;

  Pose() : m_(Matrix4::Identity()) {}
  explicit Pose(const Matrix4& m);

  static Pose identity() { return Pose(); }
  static Pose from_translation(const Eigen::Vector3d& t);
  /// Rotation about +z by `yaw` radians, then translation.
  static Pose from_yaw(double yaw, const Eigen::Vector3d& t = Eigen::Vector3d::Zero());
  static Pose from_rotation_translation(const Eigen::Matrix3d& r, const Eigen::Vector3d& t);

  const Matrix4& matrix() const { return m_; }
  Eigen::Matrix3d rotation() const { return m_.topLeftCorner<3, 3>(); }
  Eigen::Vector3d translation() const { return m_.topRightCorner<3, 1>(); }

  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;

  /// Maps a point through the transform (homogeneous with w=1).
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const;

  bool is_approx(const Pose& other, double tol = 1e-12) const {
    return (m_ - other.m_).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Matrix4 m_;
};

/// One LiDAR sweep. `seq_index` is the scan's position inside a model input
/// window: 0 is the current (newest) scan and indices increase into the
/// past. Loaders leave it 0; window assembly rewrites it.
struct Scan {
  std::vector<Eigen::Vector3d> points;
  std::vector<PointClass> labels;  // empty = unlabeled
  int seq_index = 0;

  bool has_labels() const { return !labels.empty(); }
  std::size_t size() const { return points.size(); }
  void check_labels() const {
    if (has_labels() && labels.size() != points.size())
      throw ArgumentError("scan labels must have exactly one entry per point");
  }
};

/// Chains relative poses into the transform from scan j's frame to the
/// current scan's frame: T_j^0 = T_1^0 * T_2^1 * ... * T_j^{j-1}.
/// `relative_poses[k]` holds T_{k+1}^{k}. j = 0 yields identity.
Pose compose_to_current(std::span<const Pose> relative_poses, std::size_t j);

/// Maps every point of `scan` through `pose`; labels and seq_index carry over.
Scan transform_scan(const Scan& scan, const Pose& pose);

/// Aligns a current-first scan sequence into the current scan's viewpoint.
/// Requires relative_poses.size() == scans.size() - 1. With use_poses=false
/// the scans are returned untouched (pose-free ablation).
std::vector<Scan> align_sequence(std::span<const Scan> scans,
                                 std::span<const Pose> relative_poses,
                                 bool use_poses = true);

}  // namespace stmos
