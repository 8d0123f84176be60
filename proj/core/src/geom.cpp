#include "arshoe/geom.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace arshoe {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_rotation: return "invalid rotation";
    case Errc::behind_camera: return "behind camera";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::invalid_geometry: return "invalid geometry";
    case Errc::undefined_direction: return "undefined direction";
    case Errc::insufficient_data: return "insufficient data";
    case Errc::non_convergence: return "non-convergence";
    case Errc::invalid_depth: return "invalid depth";
    case Errc::no_matches: return "no matches";
    case Errc::degenerate_blend: return "degenerate blend";
    case Errc::topology: return "topology";
    case Errc::missing_opening: return "missing opening";
    case Errc::degenerate_geometry: return "degenerate geometry";
    case Errc::format: return "format";
    case Errc::config: return "config";
  }
  return "unknown";
}

Quat Quat::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) return identity();
  const Vec3 a = axis / n;
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), a.x() * s, a.y() * s, a.z() * s};
}

double Quat::norm() const { return std::sqrt(dot(*this)); }

Quat Quat::operator*(const Quat& o) const {
  return {w * o.w - x * o.x - y * o.y - z * o.z,
          w * o.x + x * o.w + y * o.z - z * o.y,
          w * o.y - x * o.z + y * o.w + z * o.x,
          w * o.z + x * o.y - y * o.x + z * o.w};
}

Quat normalized(const Quat& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(Errc::invalid_rotation, "quaternion has zero or non-finite norm");
  }
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

Mat3 quat_to_matrix(const Quat& input) {
  Quat q = input;
  if (std::abs(q.dot(q) - 1.0) > 1e-12) q = normalized(q);
  const double ww = q.w * q.w, xx = q.x * q.x, yy = q.y * q.y, zz = q.z * q.z;
  const double xy = q.x * q.y, xz = q.x * q.z, yz = q.y * q.z;
  const double wx = q.w * q.x, wy = q.w * q.y, wz = q.w * q.z;
  Mat3 r;
  r << ww + xx - yy - zz, 2 * (xy - wz), 2 * (xz + wy),
       2 * (xy + wz), ww - xx + yy - zz, 2 * (yz - wx),
       2 * (xz - wy), 2 * (yz + wx), ww - xx - yy + zz;
  return r;
}

Quat matrix_to_quat(const Mat3& r) {
  // Shepperd: branch on the largest of (trace, diagonal) for stability.
  const double trace = r.trace();
  Quat q;
  if (trace >= r(0, 0) && trace >= r(1, 1) && trace >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
  }
  q = normalized(q);
  return q.w < 0.0 ? -q : q;
}

Quat quat_from_rotvec(const Vec3& v) {
  const double angle = v.norm();
  if (angle < 1e-12) return normalized({1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z()});
  return Quat::from_axis_angle(v, angle);
}

Vec3 rotvec_from_quat(const Quat& input) {
  Quat q = normalized(input);
  if (q.w < 0.0) q = -q;
  const Vec3 im(q.x, q.y, q.z);
  const double s = im.norm();
  if (s < 1e-12) return 2.0 * im;
  const double angle = 2.0 * std::atan2(s, q.w);
  return im * (angle / s);
}

double rotation_angle_between(const Quat& a, const Quat& b) {
  const Quat rel = normalized(a).conjugate() * normalized(b);
  const double s = std::sqrt(rel.x * rel.x + rel.y * rel.y + rel.z * rel.z);
  return 2.0 * std::atan2(s, std::abs(rel.w));
}

Pose::Pose(const Quat& rotation, const Vec3& translation)
    : rotation_(std::abs(rotation.dot(rotation) - 1.0) > 1e-15 ? normalized(rotation) : rotation),
      translation_(translation) {}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(matrix_to_quat(rotation)), translation_(translation) {}

Vec3 Pose::apply(const Vec3& p) const { return rotation_matrix() * p + translation_; }

Eigen::Matrix4d Pose::homogeneous() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(Errc::invalid_argument, "focal lengths must be positive");
  }
}

Mat3 Intrinsics::matrix() const {
  Mat3 k;
  k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return k;
}

std::vector<Vec3> transform_points(std::span<const Vec3> points, const Pose& pose) {
  const Mat3 r = pose.rotation_matrix();
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(r * p + pose.translation());
  return out;
}

Vec2 project_point(const Vec3& p, const Intrinsics& k) {
  if (!(p.z() > 0.0)) {
    throw Error(Errc::behind_camera, "point depth " + std::to_string(p.z()) + " is not positive");
  }
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

Vec3 back_project(const Vec2& pixel, double depth, const Intrinsics& k) {
  return {(pixel.x() - k.cx) * depth / k.fx, (pixel.y() - k.cy) * depth / k.fy, depth};
}

}  // namespace arshoe
