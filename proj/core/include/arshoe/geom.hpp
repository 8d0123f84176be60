#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "arshoe/error.hpp"

namespace arshoe {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Quaternion stored as (w, x, y, z). Every API in this library uses that
/// order; w is the scalar part.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quat identity() { return {}; }
  /// Rotation of `angle` radians about `axis` (need not be normalized).
  static Quat from_axis_angle(const Vec3& axis, double angle);

  double norm() const;
  double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
  Quat operator-() const { return {-w, -x, -y, -z}; }
  Quat conjugate() const { return {w, -x, -y, -z}; }
  Quat operator*(const Quat& o) const;

  friend bool operator==(const Quat&, const Quat&) = default;
};

/// Unit-norm copy of q. Throws Errc::invalid_rotation for a zero (or
/// non-finite) quaternion.
Quat normalized(const Quat& q);

/// Rotation matrix of q; q is renormalized first when |q| != 1.
Mat3 quat_to_matrix(const Quat& q);

/// Unit quaternion with non-negative w for a proper rotation matrix.
Quat matrix_to_quat(const Mat3& r);

/// Rotation vector (axis * angle) to quaternion and back.
Quat quat_from_rotvec(const Vec3& v);
Vec3 rotvec_from_quat(const Quat& q);

/// Angle in radians of the relative rotation between a and b.
double rotation_angle_between(const Quat& a, const Quat& b);

/// Rigid transform from the model frame to the camera frame: p_cam = R p + t.
class Pose {
 public:
  Pose() = default;
  Pose(const Quat& rotation, const Vec3& translation);
  Pose(const Mat3& rotation, const Vec3& translation);

  const Quat& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat3 rotation_matrix() const { return quat_to_matrix(rotation_); }

  Vec3 apply(const Vec3& p) const;
  /// 4x4 homogeneous form [R t; 0 1].
  Eigen::Matrix4d homogeneous() const;

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.rotation_ == b.rotation_ && a.translation_ == b.translation_;
  }

 private:
  Quat rotation_;
  Vec3 translation_ = Vec3::Zero();
};

/// Pinhole intrinsics in pixels. No distortion model.
struct Intrinsics {
  double fx = 300.0;
  double fy = 300.0;
  double cx = 128.0;
  double cy = 128.0;

  /// Throws Errc::invalid_argument unless fx > 0 and fy > 0.
  void validate() const;
  Mat3 matrix() const;
};

struct PointCloud {
  std::vector<Vec3> points;
};

std::vector<Vec3> transform_points(std::span<const Vec3> points, const Pose& pose);
inline std::vector<Vec3> transform_points(const PointCloud& cloud, const Pose& pose) {
  return transform_points(cloud.points, pose);
}

/// u = fx x/z + cx, v = fy y/z + cy. Throws Errc::behind_camera when z <= 0.
Vec2 project_point(const Vec3& p, const Intrinsics& k);

/// Inverse of project_point for a known depth.
Vec3 back_project(const Vec2& pixel, double depth, const Intrinsics& k);

}  // namespace arshoe
