#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "arshoe/pnp.hpp"
#include "arshoe/rng.hpp"
#include "arshoe/stabilize.hpp"

using namespace arshoe;

namespace {

constexpr double kAlpha = 0.432;
constexpr double kBeta = 2.388;

// Brute-force divergence: project every point under both poses, mean L1.
double oracle_divergence(const PointCloud& cloud, const Pose& a, const Pose& b, const Intrinsics& k) {
  double s = 0.0;
  for (const Vec3& p : cloud.points) {
    const Vec3 pa = a.rotation_matrix() * p + a.translation();
    const Vec3 pb = b.rotation_matrix() * p + b.translation();
    s += std::abs(k.fx * (pa.x() / pa.z() - pb.x() / pb.z())) + std::abs(k.fy * (pa.y() / pa.z() - pb.y() / pb.z()));
  }
  return s / static_cast<double>(cloud.points.size());
}

// Spherical interpolation, the reference nlerp is compared against.
Quat slerp(const Quat& a, Quat b, double t) {
  if (a.dot(b) < 0) b = -b;
  const double th = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
  const double sa = std::sin((1 - t) * th) / std::sin(th), sb = std::sin(t * th) / std::sin(th);
  return {sa * a.w + sb * b.w, sa * a.x + sb * b.x, sa * a.y + sb * b.y, sa * a.z + sb * b.z};
}

Pose base_pose() {
  Mat3 r;
  r << 0, -1, 0, -1, 0, 0, 0, 0, -1;
  return Pose(r, Vec3(0.01, -0.02, 0.55));
}

MatchedPairs pairs_with_shift(const Vec2& d, int n = 10) {
  MatchedPairs m;
  for (int i = 0; i < n; ++i) {
    m.prev.emplace_back(100 + i, 90 + 2 * i);
    m.cur.push_back(m.prev.back() + d);
  }
  return m;
}

}  // namespace

TEST(MeanDisplacement, ConstantAndMixed) {
  EXPECT_EQ(mean_displacement(pairs_with_shift({1, 2}, 5)), Vec2(1, 2));
  MatchedPairs m;
  m.prev = {{0, 0}, {5, 5}};
  m.cur = {{1, 0}, {8, 5}};
  EXPECT_EQ(mean_displacement(m), Vec2(2, 0));
}

TEST(MeanDisplacement, MatchesSummationOracle) {
  Rng rng(71);
  MatchedPairs m;
  long double sx = 0, sy = 0;
  for (int i = 0; i < 1000; ++i) {
    m.prev.emplace_back(rng.uniform(0, 256), rng.uniform(0, 256));
    m.cur.emplace_back(rng.uniform(0, 256), rng.uniform(0, 256));
    sx += m.cur.back().x() - m.prev.back().x();
    sy += m.cur.back().y() - m.prev.back().y();
  }
  const Vec2 v = mean_displacement(m);
  EXPECT_NEAR(v.x(), static_cast<double>(sx / 1000), 1e-12);
  EXPECT_NEAR(v.y(), static_cast<double>(sy / 1000), 1e-12);
}

TEST(MeanDisplacement, EmptyRejected) {
  try {
    mean_displacement({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_matches);
  }
}

TEST(Lift, Examples) {
  const Intrinsics k{500, 400, 0, 0};
  EXPECT_EQ(lift_displacement({500, 400}, 1.0, k), Vec3(1, 1, 0));
  EXPECT_EQ(lift_displacement({0, 0}, 1.0, k), Vec3(0, 0, 0));
  EXPECT_NEAR((lift_displacement({100, 0}, 2.0, Intrinsics{500, 500, 0, 0}) - Vec3(0.4, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_THROW(lift_displacement({1, 1}, 0.0, k), Error);
}

TEST(Predict, AddsPlanarMotionKeepsDepth) {
  EXPECT_EQ(predict_translation(Vec3(0, 0, 1), Vec3::Zero()), Vec3(0, 0, 1));
  EXPECT_EQ(predict_translation(Vec3(0, 0, 1), Vec3(0.1, -0.2, 0)), Vec3(0.1, -0.2, 1));
  EXPECT_EQ(predict_translation(Vec3(0.3, 0.1, 0.7), Vec3(1, 2, 5)).z(), 0.7);
}

TEST(Divergence, IdenticalPosesGiveZero) {
  const FootModel m = default_foot_model();
  const Pose p = base_pose();
  EXPECT_EQ(divergence(m.cloud, p.rotation_matrix(), p.translation(), p.rotation_matrix(), p.translation(), {}), 0.0);
}

TEST(Divergence, PlanarCloudShiftIsClosedForm) {
  PointCloud flat;
  for (int i = 0; i < 30; ++i) flat.points.emplace_back(0.01 * (i % 6), 0.013 * (i / 6), 0.0);
  const Intrinsics k{320, 310, 128, 128};
  const double z = 0.8, delta = 0.004;
  const Mat3 r = Mat3::Identity();
  const double d = divergence(flat, r, Vec3(0, 0, z), r, Vec3(delta, 0, z), k);
  EXPECT_NEAR(d, k.fx * delta / z, 1e-12);
}

TEST(Divergence, MatchesBruteForce) {
  const FootModel m = default_foot_model();
  const Intrinsics k;
  Rng rng(72);
  for (int i = 0; i < 50; ++i) {
    const Pose a(Quat::from_axis_angle(Vec3(rng.normal(), rng.normal(), rng.normal()), rng.uniform(0, 3)),
                 Vec3(rng.normal() * 0.05, rng.normal() * 0.05, rng.uniform(0.5, 1.0)));
    const Pose b(Quat::from_axis_angle(Vec3(rng.normal(), rng.normal(), rng.normal()), rng.uniform(0, 3)),
                 Vec3(rng.normal() * 0.05, rng.normal() * 0.05, rng.uniform(0.5, 1.0)));
    const double d = divergence(m.cloud, a.rotation_matrix(), a.translation(), b.rotation_matrix(), b.translation(), k);
    EXPECT_NEAR(d, oracle_divergence(m.cloud, a, b, k), 1e-9);
  }
}

TEST(Divergence, BehindCameraNamesPose) {
  const FootModel m = default_foot_model();
  const Mat3 r = Mat3::Identity();
  try {
    divergence(m.cloud, r, Vec3(0, 0, -1), r, Vec3(0, 0, 1), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::behind_camera);
    EXPECT_NE(std::string(e.what()).find("predicted"), std::string::npos);
  }
  try {
    divergence(m.cloud, r, Vec3(0, 0, 1), r, Vec3(0, 0, -1), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("measured"), std::string::npos);
  }
}

TEST(Weights, LawValues) {
  const StabilizerConfig cfg;
  EXPECT_EQ(rotation_weight(1.0, cfg), 1.0);
  StabilizerConfig raw = cfg;
  raw.weight_clamp = false;
  EXPECT_NEAR(rotation_weight(1.0, raw), kBeta, 1e-15);
  const double d_one = std::exp((1 - kBeta) / kAlpha);
  EXPECT_NEAR(d_one, 0.0402372, 1e-7);
  EXPECT_NEAR(rotation_weight(d_one, raw), 1.0, 1e-12);
  const double d_zero = std::exp(-kBeta / kAlpha);
  EXPECT_NEAR(d_zero, 0.0039748, 1e-7);
  EXPECT_NEAR(rotation_weight(d_zero, cfg), 0.0, 1e-9);
  EXPECT_EQ(rotation_weight(1e-6, cfg), 0.0);
  EXPECT_EQ(translation_weight(1.0), 1.0);
  EXPECT_EQ(translation_weight(0.5), 0.25);
  EXPECT_EQ(translation_weight(0.0), 0.0);
}

TEST(Weights, Monotone) {
  const StabilizerConfig cfg;
  double last = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double d = std::pow(10.0, -5.0 + 7.0 * i / 1000.0);
    const double w = rotation_weight(d, cfg);
    EXPECT_GE(w, last);
    last = w;
  }
}

TEST(Blend, EndpointsAreExact) {
  const Quat a = Quat::from_axis_angle(Vec3(1, 2, 3), 0.4), b = Quat::from_axis_angle(Vec3(3, 1, 0), 1.0);
  EXPECT_EQ(blend_rotation(a, b, 1.0), b);
  EXPECT_EQ(blend_rotation(a, b, 0.0), a);
  const Vec3 tc(1, 0, 1), tp(0, 0, 1);
  EXPECT_EQ(blend_translation(tc, tp, 1.0), tc);
  EXPECT_EQ(blend_translation(tc, tp, 0.0), tp);
  EXPECT_EQ(blend_translation(tc, tp, 0.25), Vec3(0.25, 0, 1));
}

TEST(Blend, NlerpCloseToSlerpAtSmallAngles) {
  const Quat a = Quat::identity();
  const Quat b = Quat::from_axis_angle(Vec3::UnitZ(), 10.0 * std::numbers::pi / 180);
  const Quat half = blend_rotation(a, b, 0.5);
  const Vec3 rv = rotvec_from_quat(half);
  EXPECT_NEAR(rv.z() * 180 / std::numbers::pi, 5.0, 0.01);
  EXPECT_NEAR(rv.head<2>().norm(), 0.0, 1e-12);
  EXPECT_LT(rotation_angle_between(half, slerp(a, b, 0.5)) * 180 / std::numbers::pi, 0.01);
}

TEST(Blend, HemisphereAlignedAndUnitNorm) {
  Rng rng(73);
  for (int i = 0; i < 200; ++i) {
    const Quat a = Quat::from_axis_angle(Vec3(rng.normal(), rng.normal(), rng.normal()), rng.uniform(0, 3));
    const Quat b = Quat::from_axis_angle(Vec3(rng.normal(), rng.normal(), rng.normal()), rng.uniform(0, 3));
    const double w = rng.uniform();
    const Quat q1 = blend_rotation(a, b, w), q2 = blend_rotation(a, -b, w);
    EXPECT_NEAR(q1.norm(), 1.0, 1e-12);
    EXPECT_LT(rotation_angle_between(q1, q2), 1e-9);
  }
}

TEST(Stabilize, FirstFramePassesThrough) {
  const FootModel m = default_foot_model();
  const Pose p = base_pose();
  const StabilizerStep s = stabilize({}, p, pairs_with_shift({1, 1}), m.cloud, {});
  EXPECT_TRUE(s.pass_through);
  EXPECT_EQ(s.refined, p);
  EXPECT_TRUE(s.state.initialized);
}

TEST(Stabilize, NoPairsPassesThrough) {
  const FootModel m = default_foot_model();
  const Pose p = base_pose();
  const StabilizerState st{Pose(Quat::identity(), Vec3(0, 0, 1)), true};
  const StabilizerStep s = stabilize(st, p, {}, m.cloud, {});
  EXPECT_TRUE(s.pass_through);
  EXPECT_EQ(s.refined, p);
  EXPECT_EQ(s.state.prev_pose, p);
}

TEST(Stabilize, StaticZeroNoiseIsIdentical) {
  const FootModel m = default_foot_model();
  Stabilizer stab(m.cloud, {});
  const Pose p = base_pose();
  for (int f = 0; f < 20; ++f) EXPECT_EQ(stab.update(p, pairs_with_shift({0, 0})).refined, p);
}

TEST(Stabilize, LargeMotionPassesThroughBitwise) {
  const FootModel m = default_foot_model();
  const Intrinsics k;
  Stabilizer stab(m.cloud, k);
  Pose prev = base_pose();
  stab.update(prev, {});
  Rng rng(74);
  for (int f = 1; f < 50; ++f) {
    const Pose cur(Quat::from_axis_angle(Vec3(rng.normal(), rng.normal(), rng.normal()), 0.05) * prev.rotation(),
                   prev.translation() + Vec3(rng.normal() * 0.01, rng.normal() * 0.01, 0));
    // Pairs with no displacement: the prediction stays at the previous pose.
    const double d = oracle_divergence(m.cloud, prev, cur, k);
    ASSERT_GE(d, 1.0);
    const StabilizerStep s = stab.update(cur, pairs_with_shift({0, 0}));
    EXPECT_EQ(s.w_r, 1.0);
    EXPECT_EQ(s.refined, cur);
    prev = cur;
  }
}

TEST(Stabilize, HoldBelowZeroWeight) {
  const FootModel m = default_foot_model();
  const Intrinsics k;
  const Pose prev = base_pose();
  // A 1e-7 m sideways step and near-zero flow: D is far below exp(-beta/alpha).
  const Pose cur(prev.rotation(), prev.translation() + Vec3(1e-7, 0, 0));
  const MatchedPairs pairs = pairs_with_shift({1e-5, -5e-6});
  const StabilizerStep s = stabilize({prev, true}, cur, pairs, m.cloud, k);
  EXPECT_EQ(s.w_r, 0.0);
  EXPECT_EQ(s.refined.rotation(), prev.rotation());
  const Vec3 expected = predict_translation(prev.translation(), lift_displacement(mean_displacement(pairs), prev.translation().z(), k));
  EXPECT_EQ(s.refined.translation(), expected);
}

TEST(Stabilize, IntermediateWeightBlendsBothParts) {
  const FootModel m = default_foot_model();
  const Intrinsics k;
  const Pose prev = base_pose();
  // Pick a step whose divergence lands between the two thresholds.
  const Pose cur(Quat::from_axis_angle(Vec3::UnitZ(), 2e-5) * prev.rotation(), prev.translation() + Vec3(2e-5, 0, 0));
  const StabilizerStep s = stabilize({prev, true}, cur, pairs_with_shift({0, 0}), m.cloud, k);
  ASSERT_GT(s.w_r, 0.0);
  ASSERT_LT(s.w_r, 1.0);
  EXPECT_EQ(s.w_t, s.w_r * s.w_r);
  EXPECT_NEAR(s.refined.rotation().norm(), 1.0, 1e-12);
  EXPECT_EQ(s.refined.translation(), blend_translation(cur.translation(), prev.translation(), s.w_t));
}

TEST(Stabilize, PrevPoseSourceAndLiteralPrediction) {
  const FootModel m = default_foot_model();
  const Intrinsics k;
  const Pose prev = base_pose();
  const Pose cur(prev.rotation(), prev.translation() + Vec3(1e-7, 0, 0));
  StabilizerConfig raw;
  raw.prev_pose_source = PrevPoseSource::raw;
  EXPECT_EQ(stabilize({prev, true}, cur, pairs_with_shift({0, 0}), m.cloud, k, raw).state.prev_pose, cur);
  EXPECT_EQ(stabilize({prev, true}, cur, pairs_with_shift({0, 0}), m.cloud, k).state.prev_pose.translation(),
            prev.translation());

  StabilizerConfig literal;
  literal.translation_prediction = TranslationPrediction::literal_eq5;
  const StabilizerStep s = stabilize({prev, true}, cur, pairs_with_shift({0, 0}), m.cloud, k, literal);
  EXPECT_EQ(s.refined.translation(), cur.translation());
}

TEST(StabilizerConfigTest, Validation) {
  StabilizerConfig c;
  c.alpha = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.d_floor = 0;
  EXPECT_THROW(c.validate(), Error);
}
