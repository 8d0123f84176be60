#include "arshoe/pnp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace arshoe {

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

double sum_squared_error(std::span<const Correspondence> cs, const Mat3& r, const Vec3& t, const Intrinsics& k) {
  double acc = 0.0;
  for (const Correspondence& c : cs) {
    const Vec3 pc = r * c.model + t;
    if (!(pc.z() > 0.0)) return std::numeric_limits<double>::infinity();
    acc += (project_point(pc, k) - c.pixel).squaredNorm();
  }
  return acc;
}

}  // namespace

Pose dlt_pose(std::span<const Correspondence> cs, const Intrinsics& k) {
  k.validate();
  const int n = static_cast<int>(cs.size());
  if (n < 6) throw Error(Errc::insufficient_data, "PnP needs at least 6 correspondences, got " + std::to_string(n));

  // Hartley-style conditioning of the model points.
  Vec3 centroid = Vec3::Zero();
  for (const Correspondence& c : cs) centroid += c.model;
  centroid /= n;
  double spread = 0.0;
  for (const Correspondence& c : cs) spread += (c.model - centroid).norm();
  spread /= n;
  if (!(spread > 0.0)) throw Error(Errc::insufficient_data, "model points coincide");
  const double scale = std::sqrt(3.0) / spread;

  Eigen::MatrixXd a(2 * n, 12);
  for (int i = 0; i < n; ++i) {
    const Vec3 x = (cs[i].model - centroid) * scale;
    const double u = (cs[i].pixel.x() - k.cx) / k.fx;
    const double v = (cs[i].pixel.y() - k.cy) / k.fy;
    a.row(2 * i) << x.x(), x.y(), x.z(), 1, 0, 0, 0, 0, -u * x.x(), -u * x.y(), -u * x.z(), -u;
    a.row(2 * i + 1) << 0, 0, 0, 0, x.x(), x.y(), x.z(), 1, -v * x.x(), -v * x.y(), -v * x.z(), -v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd sol = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> p;
  p << sol(0), sol(1), sol(2), sol(3), sol(4), sol(5), sol(6), sol(7), sol(8), sol(9), sol(10), sol(11);

  // Undo the conditioning: P_model = P_cond * [s I, -s c; 0 1].
  Mat3 m = p.leftCols<3>() * scale;
  Vec3 t4 = p.col(3) - m * centroid;
  // The null vector's sign is arbitrary; keep the points in front.
  double depth_sum = 0.0;
  for (const Correspondence& c : cs) depth_sum += m.row(2).dot(c.model) + t4.z();
  if (depth_sum < 0) {
    m = -m;
    t4 = -t4;
  }
  Eigen::JacobiSVD<Mat3> msvd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = msvd.matrixU() * msvd.matrixV().transpose();
  if (r.determinant() < 0) {
    Mat3 u = msvd.matrixU();
    u.col(2) *= -1;
    r = u * msvd.matrixV().transpose();
  }
  const double s = msvd.singularValues().mean();
  return Pose(r, t4 / s);
}

double mean_reprojection_error(std::span<const Correspondence> cs, const Pose& pose, const Intrinsics& k) {
  if (cs.empty()) return 0.0;
  const Mat3 r = pose.rotation_matrix();
  double acc = 0.0;
  for (const Correspondence& c : cs) acc += (project_point(r * c.model + pose.translation(), k) - c.pixel).norm();
  return acc / static_cast<double>(cs.size());
}

namespace {

struct LmRun {
  Mat3 r;
  Vec3 t;
  double cost = 0.0;
  double initial_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  bool improved = false;
};

LmRun refine(std::span<const Correspondence> cs, const Intrinsics& k, const LmOptions& opt, Mat3 r, Vec3 t) {
  const int n = static_cast<int>(cs.size());
  LmRun run;
  double cost = sum_squared_error(cs, r, t, k);
  run.initial_cost = cost;
  double lambda = opt.initial_damping;
  int iterations = 0;
  bool converged = cost == 0.0;
  bool improved = false;

  Eigen::MatrixXd jac(2 * n, 6);
  Eigen::VectorXd res(2 * n);
  while (!converged && iterations < opt.max_iterations) {
    ++iterations;
    for (int i = 0; i < n; ++i) {
      const Vec3 rp = r * cs[i].model;
      const Vec3 pc = rp + t;
      const double iz = 1.0 / pc.z();
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << k.fx * iz, 0, -k.fx * pc.x() * iz * iz, 0, k.fy * iz, -k.fy * pc.y() * iz * iz;
      jac.block<2, 3>(2 * i, 0) = dproj * (-skew(rp));
      jac.block<2, 3>(2 * i, 3) = dproj;
      res.segment<2>(2 * i) = Vec2(k.fx * pc.x() * iz + k.cx, k.fy * pc.y() * iz + k.cy) - cs[i].pixel;
    }
    const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
    const Eigen::Matrix<double, 6, 1> grad = jac.transpose() * res;
    if (grad.cwiseAbs().maxCoeff() < opt.gradient_tolerance) {
      converged = true;
      break;
    }

    bool accepted = false;
    while (!accepted && iterations <= opt.max_iterations) {
      Eigen::Matrix<double, 6, 6> aug = jtj;
      aug.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Matrix<double, 6, 1> step = aug.ldlt().solve(-grad);
      const Mat3 r_new = quat_to_matrix(quat_from_rotvec(step.head<3>())) * r;
      const Vec3 t_new = t + step.tail<3>();
      const double new_cost = sum_squared_error(cs, r_new, t_new, k);
      if (new_cost < cost) {
        const double rel = (cost - new_cost) / std::max(cost, 1e-300);
        r = r_new;
        t = t_new;
        cost = new_cost;
        lambda = std::max(lambda / opt.damping_factor, 1e-15);
        accepted = improved = true;
        if (rel < 1e-15 || step.norm() < 1e-15 * (t.norm() + 1.0)) converged = true;
      } else {
        lambda *= opt.damping_factor;
        if (step.norm() < 1e-15 * (t.norm() + 1.0) || lambda > 1e20) {
          // No representable improvement left.
          converged = true;
          break;
        }
        ++iterations;
      }
    }
  }
  run.r = r;
  run.t = t;
  run.cost = cost;
  run.iterations = iterations;
  run.converged = converged;
  run.improved = improved;
  return run;
}

// Near-planar point sets admit a second pose that tilts the plane the other
// way about the line of sight. Its rotation: the model plane normal, seen
// from the camera, mirrored about the viewing ray through the centroid.
Mat3 flipped_rotation(std::span<const Correspondence> cs, const Mat3& r, const Vec3& t) {
  Vec3 centroid = Vec3::Zero();
  for (const Correspondence& c : cs) centroid += c.model;
  centroid /= static_cast<double>(cs.size());
  Mat3 scatter = Mat3::Zero();
  for (const Correspondence& c : cs) scatter += (c.model - centroid) * (c.model - centroid).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  const Vec3 normal = r * eig.eigenvectors().col(0);
  const Vec3 ray = (r * centroid + t).normalized();
  const Vec3 mirrored = 2.0 * normal.dot(ray) * ray - normal;
  const Vec3 axis = normal.cross(mirrored);
  const double angle = std::atan2(axis.norm(), normal.dot(mirrored));
  if (axis.norm() < 1e-12) return r;
  return quat_to_matrix(quat_from_rotvec(axis.normalized() * angle)) * r;
}

}  // namespace

PnpResult solve_pnp(std::span<const Correspondence> cs, const Intrinsics& k, const LmOptions& opt) {
  const Pose init = dlt_pose(cs, k);
  Mat3 r = init.rotation_matrix();
  Vec3 t = init.translation();
  if (!std::isfinite(sum_squared_error(cs, r, t, k))) {
    // The linear estimate put points behind the camera; start from a
    // fronto-parallel guess at the DLT depth instead.
    t = Vec3(0, 0, std::max(std::abs(t.z()), 0.1));
    r = Mat3::Identity();
  }

  LmRun best = refine(cs, k, opt, r, t);
  const Mat3 r_flip = flipped_rotation(cs, best.r, best.t);
  if (std::isfinite(sum_squared_error(cs, r_flip, best.t, k))) {
    LmRun alt = refine(cs, k, opt, r_flip, best.t);
    if (alt.cost < best.cost) {
      alt.iterations += best.iterations;
      alt.initial_cost = best.initial_cost;
      alt.improved = true;
      best = alt;
    }
  }

  PnpResult result;
  result.pose = Pose(best.r, best.t);
  result.residual_px = mean_reprojection_error(cs, result.pose, k);
  result.iterations = best.iterations;

  if (!best.converged && !best.improved && !(best.cost < best.initial_cost)) {
    throw NonConvergenceError("Levenberg-Marquardt made no progress in " + std::to_string(best.iterations) +
                                  " iterations",
                              result);
  }
  for (const Correspondence& c : cs) {
    if (!(result.pose.apply(c.model).z() > 0.0)) {
      throw NonConvergenceError("solution places model points behind the camera", result);
    }
  }
  return result;
}

std::array<Vec2, kNumKeypoints> project_model_keypoints(const FootModel& model, const Pose& pose, const Intrinsics& k) {
  std::array<Vec2, kNumKeypoints> out;
  const auto cam = transform_points(model.keypoints3d, pose);
  for (int i = 0; i < kNumKeypoints; ++i) out[i] = project_point(cam[i], k);
  return out;
}

std::vector<Correspondence> correspondences_for(const FootInstance& instance, const FootModel& model) {
  std::vector<Correspondence> cs;
  for (int i = 0; i < kNumKeypoints; ++i) {
    if (instance.keypoints[i]) cs.push_back({*instance.keypoints[i], model.keypoints3d[i]});
  }
  return cs;
}

Vec3 euler_xyz(const Mat3& r) {
  const double b = std::asin(std::clamp(r(0, 2), -1.0, 1.0));
  const double a = std::atan2(-r(1, 2), r(2, 2));
  const double c = std::atan2(-r(0, 1), r(0, 0));
  return {a, b, c};
}

Mat3 rotation_from_euler_xyz(const Vec3& angles) {
  return quat_to_matrix(Quat::from_axis_angle(Vec3::UnitX(), angles.x())) *
         quat_to_matrix(Quat::from_axis_angle(Vec3::UnitY(), angles.y())) *
         quat_to_matrix(Quat::from_axis_angle(Vec3::UnitZ(), angles.z()));
}

PoseError pose_error(const Pose& estimate, const Pose& truth) {
  const Mat3 rel = estimate.rotation_matrix().transpose() * truth.rotation_matrix();
  const Vec3 e = euler_xyz(rel);
  PoseError out;
  out.euler_deg = e.cwiseAbs().mean() * 180.0 / std::numbers::pi;
  out.translation_cm = (estimate.translation() - truth.translation()).norm() * 100.0;
  return out;
}

}  // namespace arshoe
