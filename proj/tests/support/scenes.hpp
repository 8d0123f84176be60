#pragma once

// Random keypoint scenes in 64x64 tensor space, shared by unit and
// acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "arshoe/keypoints.hpp"
#include "arshoe/pnp.hpp"
#include "arshoe/rng.hpp"
#include "arshoe/targets.hpp"

namespace arshoe::scenes {

using Keypoints = std::array<Vec2, kNumKeypoints>;

// Plan view of the default model's keypoints: heel-to-toe along -y (toe up),
// scaled by `px_per_m`, rotated by `angle`, centered on `center`.
inline Keypoints plan_view_foot(double px_per_m, double angle, const Vec2& center) {
  const FootModel model = default_foot_model();
  const double c = std::cos(angle), s = std::sin(angle);
  Keypoints out;
  for (int i = 0; i < kNumKeypoints; ++i) {
    const Vec3& p = model.keypoints3d[static_cast<std::size_t>(i)];
    const Vec2 local(-p.y() * px_per_m, -p.x() * px_per_m);
    out[static_cast<std::size_t>(i)] = center + Vec2(c * local.x() - s * local.y(), s * local.x() + c * local.y());
  }
  return out;
}

inline double min_cross_distance(const Keypoints& a, const Keypoints& b) {
  double d = std::numeric_limits<double>::infinity();
  for (const Vec2& p : a) {
    for (const Vec2& q : b) d = std::min(d, (p - q).norm());
  }
  return d;
}

inline bool inside_grid(const Keypoints& k, double margin, int size = kTensorSize) {
  return std::all_of(k.begin(), k.end(), [&](const Vec2& p) {
    return p.x() >= margin && p.y() >= margin && p.x() <= size - 1 - margin && p.y() <= size - 1 - margin;
  });
}

inline Keypoints jitter(Keypoints k, double sigma, Rng& rng) {
  for (Vec2& p : k) p += Vec2(rng.normal(0.0, sigma), rng.normal(0.0, sigma));
  return k;
}

// Two feet whose keypoints stay at least `min_gap` apart across feet.
inline std::array<Keypoints, 2> two_foot_scene(Rng& rng, double min_gap, double sigma) {
  for (;;) {
    std::array<Keypoints, 2> feet;
    for (Keypoints& f : feet) {
      const double scale = rng.uniform(90.0, 130.0);
      const double angle = rng.uniform(-0.6, 0.6);
      f = jitter(plan_view_foot(scale, angle, Vec2(rng.uniform(8, 56), rng.uniform(14, 50))), sigma, rng);
    }
    if (inside_grid(feet[0], 2.0) && inside_grid(feet[1], 2.0) && min_cross_distance(feet[0], feet[1]) >= min_gap) {
      return feet;
    }
  }
}

// Eight keypoints scattered over the grid with pairwise spacing >= min_gap.
inline Keypoints scattered_foot(Rng& rng, double min_gap, double margin) {
  for (;;) {
    Keypoints k;
    bool ok = true;
    for (int i = 0; i < kNumKeypoints && ok; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
        const Vec2 p(rng.uniform(margin, kTensorSize - 1 - margin), rng.uniform(margin, kTensorSize - 1 - margin));
        placed = std::all_of(k.begin(), k.begin() + i, [&](const Vec2& q) { return (p - q).norm() >= min_gap; });
        if (placed) k[static_cast<std::size_t>(i)] = p;
      }
      ok = placed;
    }
    if (ok) return k;
  }
}

inline OutputTensors encode_feet(const std::vector<Keypoints>& feet, const TargetConfig& cfg = {}) {
  std::vector<FootInstance> inst;
  for (const Keypoints& k : feet) inst.push_back(FootInstance::from_points(k));
  return encode_targets(inst, Skeleton::foot(), {}, {}, cfg);
}

}  // namespace arshoe::scenes
