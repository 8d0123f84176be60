#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "arshoe/decode.hpp"
#include "scenes.hpp"

using namespace arshoe;
using scenes::Keypoints;

namespace {

Tensor gaussian_channel(std::vector<Vec2> peaks, double sigma = 2.0) {
  std::vector<FootInstance> inst;
  for (const Vec2& p : peaks) {
    FootInstance f;
    f.keypoints[0] = p;
    inst.push_back(f);
  }
  return encode_heatmaps(inst, sigma);
}

// Exhaustive scan: strict 8-neighbourhood maxima of channel 0 above `thr`.
int count_local_maxima(const Tensor& h, double thr) {
  int n = 0;
  for (int y = 0; y < h.height(); ++y) {
    for (int x = 0; x < h.width(); ++x) {
      const float v = h.at(0, y, x);
      if (v <= thr) continue;
      bool peak = true;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if ((dx || dy) && xx >= 0 && yy >= 0 && xx < h.width() && yy < h.height() && h.at(0, yy, xx) >= v) {
            peak = false;
          }
        }
      }
      n += peak;
    }
  }
  return n;
}

Tensor uniform_field(const Vec2& v) {
  Tensor t(kPafChannels, 64, 64);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      t.at(0, y, x) = static_cast<float>(v.x());
      t.at(1, y, x) = static_cast<float>(v.y());
    }
  }
  return t;
}

// Index of the foot whose keypoint `slot` is nearest to p.
int owner(const std::array<Keypoints, 2>& feet, int slot, const Vec2& p) {
  const auto s = static_cast<std::size_t>(slot);
  return (feet[0][s] - p).norm() <= (feet[1][s] - p).norm() ? 0 : 1;
}

}  // namespace

TEST(Peaks, ZeroChannelHasNoCandidates) {
  EXPECT_TRUE(extract_peaks(Tensor(kHeatmapChannels, 64, 64), 0.3, 3.0).empty());
}

TEST(Peaks, SingleGaussianAtCenter) {
  const auto peaks = extract_peaks(gaussian_channel({{32, 32}}), 0.3, 3.0);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_EQ(peaks[0].channel, 0);
  EXPECT_LE((peaks[0].position - Vec2(32, 32)).norm(), 0.25);
  EXPECT_NEAR(peaks[0].score, 1.0, 1e-6);
}

TEST(Peaks, TwoGaussiansMatchExhaustiveScan) {
  const Tensor h = gaussian_channel({{16, 16}, {48, 48}});
  const auto peaks = extract_peaks(h, 0.3, 3.0);
  EXPECT_EQ(peaks.size(), 2u);
  EXPECT_EQ(static_cast<int>(peaks.size()), count_local_maxima(h, 0.3));
}

TEST(Peaks, SubPixelRefinementIsExactForGaussians) {
  Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p(rng.uniform(4, 60), rng.uniform(4, 60));
    const auto peaks = extract_peaks(gaussian_channel({p}), 0.3, 3.0);
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_LT((peaks[0].position - p).norm(), 1e-3);
  }
}

TEST(Peaks, SuppressionKeepsStrongerPeak) {
  // Two plateaus 2 px apart in the same channel: only one survives.
  Tensor h(kHeatmapChannels, 64, 64);
  h.at(0, 20, 20) = 0.9f;
  h.at(0, 20, 22) = 0.8f;
  const auto peaks = extract_peaks(h, 0.3, 3.0);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_NEAR(peaks[0].score, 0.9, 1e-6);
}

TEST(ConnectionScore, AlignedOrthogonalAndZero) {
  const Vec2 a(10, 10), b(40, 10);
  EXPECT_NEAR(connection_score(uniform_field({1, 0}), 0, a, b, 10), 1.0, 1e-7);
  EXPECT_NEAR(connection_score(uniform_field({0, 1}), 0, a, b, 10), 0.0, 1e-12);
  EXPECT_EQ(connection_score(Tensor(kPafChannels, 64, 64), 0, a, b, 10), 0.0);
}

TEST(ConnectionScore, AntisymmetricUnderReversal) {
  Rng rng(42);
  const auto feet = scenes::two_foot_scene(rng, 20.0, 0.5);
  const Tensor paf = scenes::encode_feet({feet[0], feet[1]}).pafmap;
  for (int i = 0; i < 200; ++i) {
    const Vec2 a(rng.uniform(0, 63), rng.uniform(0, 63)), b(rng.uniform(0, 63), rng.uniform(0, 63));
    const int e = static_cast<int>(rng.below(kNumEdges));
    EXPECT_NEAR(connection_score(paf, e, a, b, 10), -connection_score(paf, e, b, a, 10), 1e-12);
  }
}

TEST(ConnectionScore, CoincidentEndpointsRejected) {
  try {
    connection_score(uniform_field({1, 0}), 0, {5, 5}, {5, 5}, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::undefined_direction);
  }
}

TEST(Grouping, SingleFootRoundTrip) {
  Rng rng(43);
  const Keypoints truth = scenes::plan_view_foot(120.0, 0.2, {32, 32});
  const OutputTensors t = scenes::encode_feet({truth});
  const auto inst = decode_instances(t.heatmap, t.pafmap, Skeleton::foot());
  ASSERT_EQ(inst.size(), 1u);
  EXPECT_EQ(inst[0].completeness(), 8);
  for (int j = 0; j < kNumKeypoints; ++j) {
    EXPECT_LT((*inst[0].keypoints[static_cast<std::size_t>(j)] - truth[static_cast<std::size_t>(j)]).norm(), 0.5);
  }
}

TEST(Grouping, TwoFeetGreedyIsScoreOptimal) {
  Rng rng(44);
  const Skeleton sk = Skeleton::foot();
  for (int trial = 0; trial < 20; ++trial) {
    const auto feet = scenes::two_foot_scene(rng, 20.0, 0.5);
    const OutputTensors t = scenes::encode_feet({feet[0], feet[1]});
    const auto inst = decode_instances(t.heatmap, t.pafmap, sk);
    ASSERT_EQ(inst.size(), 2u);
    for (const FootInstance& f : inst) {
      ASSERT_TRUE(f.complete());
      const int foot = owner(feet, 0, *f.keypoints[0]);
      for (int j = 0; j < kNumKeypoints; ++j) EXPECT_EQ(owner(feet, j, *f.keypoints[static_cast<std::size_t>(j)]), foot);
    }

    // Every way of pairing each edge's two candidates: 2^7 assignments. The
    // foot-consistent one must have the highest total score.
    std::array<Keypoints, 2> dec;
    for (const FootInstance& f : inst) {
      const int foot = owner(feet, 0, *f.keypoints[0]);
      for (int j = 0; j < kNumKeypoints; ++j) dec[foot][static_cast<std::size_t>(j)] = *f.keypoints[static_cast<std::size_t>(j)];
    }
    double best = -1e9;
    int best_mask = -1;
    for (int mask = 0; mask < (1 << kNumEdges); ++mask) {
      double total = 0.0;
      for (int e = 0; e < kNumEdges; ++e) {
        const auto [a, b] = sk.edges[static_cast<std::size_t>(e)];
        const int cross = (mask >> e) & 1;
        for (int foot = 0; foot < 2; ++foot) {
          total += connection_score(t.pafmap, e, dec[foot][static_cast<std::size_t>(a)],
                                    dec[foot ^ cross][static_cast<std::size_t>(b)], 10);
        }
      }
      if (total > best) {
        best = total;
        best_mask = mask;
      }
    }
    EXPECT_EQ(best_mask, 0);
  }
}

TEST(Grouping, NoAcceptedEdgesGivesSingletons) {
  Rng rng(45);
  const auto feet = scenes::two_foot_scene(rng, 20.0, 0.0);
  const OutputTensors t = scenes::encode_feet({feet[0], feet[1]});
  const auto inst = decode_instances(t.heatmap, Tensor(kPafChannels, 64, 64), Skeleton::foot());
  ASSERT_EQ(inst.size(), 16u);
  for (const FootInstance& f : inst) EXPECT_EQ(f.completeness(), 1);
}

TEST(Grouping, NoCandidateUsedTwice) {
  Rng rng(46);
  for (int trial = 0; trial < 30; ++trial) {
    // Feet allowed to overlap so that conflicts actually arise.
    const auto feet = scenes::two_foot_scene(rng, 0.0, 1.5);
    const OutputTensors t = scenes::encode_feet({feet[0], feet[1]});
    const auto cands = extract_peaks(t.heatmap, 0.3, 3.0);
    const auto groups = group_candidates(cands, t.pafmap, Skeleton::foot(), 0.4);
    std::multiset<int> used;
    for (const CandidateGroup& g : groups) {
      for (int j = 0; j < kNumKeypoints; ++j) {
        const int c = g[static_cast<std::size_t>(j)];
        if (c < 0) continue;
        used.insert(c);
        EXPECT_EQ(cands[static_cast<std::size_t>(c)].channel, j);
      }
    }
    EXPECT_EQ(used.size(), cands.size());
    for (int c = 0; c < static_cast<int>(cands.size()); ++c) EXPECT_EQ(used.count(c), 1u);
  }
}
