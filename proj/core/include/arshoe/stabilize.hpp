#pragma once

#include "arshoe/geom.hpp"
#include "arshoe/track.hpp"

namespace arshoe {

enum class PrevPoseSource { refined, raw };
enum class TranslationPrediction { propagate_prev, literal_eq5 };

struct StabilizerConfig {
  double alpha = 0.432;
  double beta = 2.388;
  double d_floor = 1e-3;  ///< pixels; D is floored here before the log
  bool weight_clamp = true;
  PrevPoseSource prev_pose_source = PrevPoseSource::refined;
  TranslationPrediction translation_prediction = TranslationPrediction::propagate_prev;

  /// Throws Errc::config unless alpha > 0 and d_floor > 0.
  void validate() const;
};

struct StabilizerState {
  Pose prev_pose;
  bool initialized = false;
};

/// Mean of cur - prev over the pairs. Throws Errc::no_matches when empty.
Vec2 mean_displacement(const MatchedPairs& pairs);

/// Pixel displacement lifted to the camera frame at constant depth t_z:
/// (vx t_z / fx, vy t_z / fy, 0). Throws Errc::invalid_depth for t_z <= 0.
Vec3 lift_displacement(const Vec2& v_pix, double t_z, const Intrinsics& k);

/// Flow-predicted translation; z is carried over unchanged.
inline Vec3 predict_translation(const Vec3& base_translation, const Vec3& v_cam) {
  return {base_translation.x() + v_cam.x(), base_translation.y() + v_cam.y(), base_translation.z()};
}

/// Mean per-point L1 pixel distance between the cloud projected under
/// [r_prev | t_pred] and under [r_cur | t_cur]. Throws Errc::behind_camera
/// naming the offending pose, or Errc::invalid_argument for an empty cloud.
double divergence(const PointCloud& cloud, const Mat3& r_prev, const Vec3& t_pred, const Mat3& r_cur,
                  const Vec3& t_cur, const Intrinsics& k);

/// alpha ln(max(D, d_floor)) + beta, clamped to [0, 1] when weight_clamp.
double rotation_weight(double d, const StabilizerConfig& cfg);
inline double translation_weight(double w_r) { return w_r * w_r; }

/// Hemisphere-aligned normalised lerp; w = 1 returns q_cur and w = 0
/// returns q_prev exactly. Throws Errc::degenerate_blend when the blend
/// vanishes.
Quat blend_rotation(const Quat& q_prev, const Quat& q_cur, double w_r);

/// w_t t_cur + (1 - w_t) t_pred; endpoints are returned exactly.
Vec3 blend_translation(const Vec3& t_cur, const Vec3& t_pred, double w_t);

struct StabilizerStep {
  Pose refined;
  StabilizerState state;
  double divergence = 0.0;
  double w_r = 1.0;
  double w_t = 1.0;
  bool pass_through = false;  ///< first frame or no matched pairs
};

/// One filter step. The first frame initialises the state; an empty pair
/// list passes the measurement through.
StabilizerStep stabilize(const StabilizerState& state, const Pose& measured, const MatchedPairs& pairs,
                         const PointCloud& cloud, const Intrinsics& k, const StabilizerConfig& cfg = {});

/// Convenience wrapper holding the state of one foot stream.
class Stabilizer {
 public:
  Stabilizer(PointCloud cloud, Intrinsics k, StabilizerConfig cfg = {})
      : cloud_(std::move(cloud)), k_(k), cfg_(cfg) {
    cfg_.validate();
  }

  StabilizerStep update(const Pose& measured, const MatchedPairs& pairs) {
    StabilizerStep step = stabilize(state_, measured, pairs, cloud_, k_, cfg_);
    state_ = step.state;
    return step;
  }
  const StabilizerState& state() const { return state_; }
  void reset() { state_ = {}; }

 private:
  PointCloud cloud_;
  Intrinsics k_;
  StabilizerConfig cfg_;
  StabilizerState state_;
};

}  // namespace arshoe
