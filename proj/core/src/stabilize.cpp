#include "arshoe/stabilize.hpp"

#include <algorithm>
#include <cmath>

namespace arshoe {

void StabilizerConfig::validate() const {
  if (!(alpha > 0.0)) throw Error(Errc::config, "stabilizer alpha must be positive");
  if (!(d_floor > 0.0)) throw Error(Errc::config, "stabilizer d_floor must be positive");
}

Vec2 mean_displacement(const MatchedPairs& pairs) {
  if (pairs.prev.size() != pairs.cur.size()) throw Error(Errc::invalid_argument, "pair lists differ in length");
  if (pairs.empty()) throw Error(Errc::no_matches, "no matched corner pairs");
  Vec2 sum = Vec2::Zero();
  for (std::size_t i = 0; i < pairs.size(); ++i) sum += pairs.cur[i] - pairs.prev[i];
  return sum / static_cast<double>(pairs.size());
}

Vec3 lift_displacement(const Vec2& v_pix, double t_z, const Intrinsics& k) {
  if (!(t_z > 0.0)) throw Error(Errc::invalid_depth, "depth must be positive to lift flow");
  return {v_pix.x() * t_z / k.fx, v_pix.y() * t_z / k.fy, 0.0};
}

double divergence(const PointCloud& cloud, const Mat3& r_prev, const Vec3& t_pred, const Mat3& r_cur,
                  const Vec3& t_cur, const Intrinsics& k) {
  if (cloud.points.empty()) throw Error(Errc::invalid_argument, "divergence needs a nonempty cloud");
  double acc = 0.0;
  for (const Vec3& p : cloud.points) {
    const Vec3 a = r_prev * p + t_pred;
    const Vec3 b = r_cur * p + t_cur;
    if (!(a.z() > 0.0)) throw Error(Errc::behind_camera, "cloud point behind camera under the predicted pose");
    if (!(b.z() > 0.0)) throw Error(Errc::behind_camera, "cloud point behind camera under the measured pose");
    const Vec2 d = project_point(a, k) - project_point(b, k);
    acc += std::abs(d.x()) + std::abs(d.y());
  }
  return acc / static_cast<double>(cloud.points.size());
}

double rotation_weight(double d, const StabilizerConfig& cfg) {
  const double w = cfg.alpha * std::log(std::max(d, cfg.d_floor)) + cfg.beta;
  return cfg.weight_clamp ? std::clamp(w, 0.0, 1.0) : w;
}

Quat blend_rotation(const Quat& q_prev, const Quat& q_cur, double w) {
  if (w == 1.0) return q_cur;
  if (w == 0.0) return q_prev;
  const Quat cur = q_prev.dot(q_cur) < 0.0 ? -q_cur : q_cur;
  const Quat mix{w * cur.w + (1 - w) * q_prev.w, w * cur.x + (1 - w) * q_prev.x, w * cur.y + (1 - w) * q_prev.y,
                 w * cur.z + (1 - w) * q_prev.z};
  if (mix.norm() < 1e-9) throw Error(Errc::degenerate_blend, "quaternion blend has vanishing norm");
  return normalized(mix);
}

Vec3 blend_translation(const Vec3& t_cur, const Vec3& t_pred, double w) {
  if (w == 1.0) return t_cur;
  if (w == 0.0) return t_pred;
  return w * t_cur + (1 - w) * t_pred;
}

StabilizerStep stabilize(const StabilizerState& state, const Pose& measured, const MatchedPairs& pairs,
                         const PointCloud& cloud, const Intrinsics& k, const StabilizerConfig& cfg) {
  StabilizerStep step;
  if (!state.initialized || pairs.empty()) {
    step.refined = measured;
    step.state = {measured, true};
    step.pass_through = true;
    return step;
  }

  const Pose& prev = state.prev_pose;
  const Vec3& base = cfg.translation_prediction == TranslationPrediction::propagate_prev ? prev.translation()
                                                                                         : measured.translation();
  const Vec3 v_cam = lift_displacement(mean_displacement(pairs), base.z(), k);
  const Vec3 t_pred = predict_translation(base, v_cam);

  step.divergence = divergence(cloud, prev.rotation_matrix(), t_pred, measured.rotation_matrix(),
                               measured.translation(), k);
  step.w_r = rotation_weight(step.divergence, cfg);
  step.w_t = translation_weight(step.w_r);

  if (step.w_r == 1.0 && step.w_t == 1.0) {
    step.refined = measured;
  } else {
    step.refined = Pose(blend_rotation(prev.rotation(), measured.rotation(), step.w_r),
                        blend_translation(measured.translation(), t_pred, step.w_t));
  }
  step.state = {cfg.prev_pose_source == PrevPoseSource::refined ? step.refined : measured, true};
  return step;
}

}  // namespace arshoe
