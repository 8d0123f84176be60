#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include <gtest/gtest.h>

#include "arshoe/occlude.hpp"
#include "arshoe/polygon.hpp"
#include "arshoe/rng.hpp"

using namespace arshoe;

namespace {

constexpr int kSize = 64;

BinaryMask square_annulus() {
  BinaryMask m(kSize, kSize);
  for (int y = 10; y <= 54; ++y)
    for (int x = 10; x <= 54; ++x)
      if (x < 20 || x > 44 || y < 20 || y > 44) m.set(x, y);
  return m;
}

BinaryMask strip(int x0, int x1, int y0, int y1) {
  BinaryMask m(kSize, kSize);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) m.set(x, y);
  return m;
}

// Foreground pixels with a 4-neighbour outside `inside`.
std::set<std::pair<int, int>> boundary_pixels(const BinaryMask& m, bool inside) {
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (m.get(x, y) != inside) continue;
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        if (m.get(x + dx, y + dy) != inside) out.emplace(x, y);
    }
  return out;
}

std::set<std::pair<int, int>> vertex_set(const Contour& c) {
  std::set<std::pair<int, int>> out;
  for (const Vec2& v : c.vertices) out.emplace(static_cast<int>(std::lround(v.x())), static_cast<int>(std::lround(v.y())));
  return out;
}

}  // namespace

TEST(Silhouettes, SquareAnnulusTracesBothBoundaries) {
  const BinaryMask shoe = square_annulus();
  const Silhouettes s = extract_silhouettes(shoe);

  std::set<std::pair<int, int>> outer_expected, inner_expected;
  for (int i = 10; i <= 54; ++i) {
    outer_expected.insert({i, 10});
    outer_expected.insert({i, 54});
    outer_expected.insert({10, i});
    outer_expected.insert({54, i});
  }
  for (int i = 20; i <= 44; ++i) {
    inner_expected.insert({i, 20});
    inner_expected.insert({i, 44});
    inner_expected.insert({20, i});
    inner_expected.insert({44, i});
  }
  EXPECT_EQ(vertex_set(s.outer), outer_expected);
  EXPECT_EQ(vertex_set(s.inner), inner_expected);
  // The scan oracle: outer ring of foreground, and hole pixels touching foreground.
  std::set<std::pair<int, int>> hole_edge;
  for (const auto& p : boundary_pixels(shoe, false))
    if (p.first >= 20 && p.first <= 44 && p.second >= 20 && p.second <= 44) hole_edge.insert(p);
  EXPECT_EQ(vertex_set(s.inner), hole_edge);

  EXPECT_GT(signed_area(s.outer.vertices), 0.0);
  EXPECT_GT(signed_area(s.inner.vertices), 0.0);
}

TEST(Silhouettes, FillDifferenceIsForegroundCount) {
  const BinaryMask shoe = square_annulus();
  const Silhouettes s = extract_silhouettes(shoe);
  const BinaryMask f0 = fill_contour(s.outer, kSize, kSize), f1 = fill_contour(s.inner, kSize, kSize);
  std::size_t band = 0;
  for (int y = 0; y < kSize; ++y)
    for (int x = 0; x < kSize; ++x) {
      const bool in_band = f0.at(x, y) && !f1.at(x, y);
      band += in_band;
      EXPECT_EQ(in_band, shoe.at(x, y));
    }
  EXPECT_EQ(band, shoe.count());
  EXPECT_EQ(band, 1400u);
}

TEST(Silhouettes, TopologyErrors) {
  try {
    extract_silhouettes(strip(10, 40, 10, 40));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::missing_opening);
  }
  try {
    extract_silhouettes(BinaryMask(kSize, kSize));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::topology);
  }
  BinaryMask two = strip(2, 10, 2, 10);
  for (int y = 30; y <= 40; ++y)
    for (int x = 30; x <= 40; ++x) two.set(x, y);
  try {
    extract_silhouettes(two);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::topology);
  }
}

TEST(LegCrossings, VerticalStripAnchorsOnTopEdge) {
  const Silhouettes s = extract_silhouettes(square_annulus());
  const auto c = mask_contour_intersections(strip(28, 36, 0, 25), s.outer);
  ASSERT_TRUE(c.has_value());
  std::set<double> xs{c->m0.point.x(), c->m1.point.x()};
  EXPECT_EQ(xs, (std::set<double>{27.5, 36.5}));
  EXPECT_EQ(c->m0.point.y(), 10.0);
  EXPECT_EQ(c->m1.point.y(), 10.0);
  // The covered arc M0 -> M1 runs through the strip.
  const auto arc = contour_arc(s.outer, c->m0, c->m1, true);
  for (std::size_t i = 1; i + 1 < arc.size(); ++i) {
    EXPECT_GE(arc[i].x(), 28.0);
    EXPECT_LE(arc[i].x(), 36.0);
  }
}

TEST(LegCrossings, EmptyOrFullLegGivesNoOcclusion) {
  const Silhouettes s = extract_silhouettes(square_annulus());
  EXPECT_FALSE(mask_contour_intersections(BinaryMask(kSize, kSize), s.outer).has_value());
  EXPECT_FALSE(mask_contour_intersections(strip(0, kSize - 1, 0, kSize - 1), s.outer).has_value());
}

TEST(LegCrossings, TangentContactIgnored) {
  const Silhouettes s = extract_silhouettes(square_annulus());
  // A single pixel of the leg touches the outer corner.
  EXPECT_FALSE(mask_contour_intersections(strip(0, 10, 0, 10), s.outer).has_value());
  const OcclusionResult r = generate_occlusion(square_annulus(), strip(0, 10, 0, 10));
  EXPECT_FALSE(r.occluded);
  EXPECT_EQ(r.mask.count(), 0u);
}

TEST(NearestPoint, ProjectsOntoHoleTopEdge) {
  const Silhouettes s = extract_silhouettes(square_annulus());
  const ContourAnchor n = nearest_contour_point(s.inner, Vec2(32, 10));
  EXPECT_EQ(n.point, Vec2(32, 20));
  const ContourAnchor v = nearest_contour_point(s.inner, s.inner.vertices[7]);
  EXPECT_EQ(v.point, s.inner.vertices[7]);
}

TEST(NearestPoint, MatchesExhaustiveSearchAndTieBreak) {
  const Silhouettes s = extract_silhouettes(square_annulus());
  Rng rng(81);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p(rng.uniform(0, 64), rng.uniform(0, 64));
    double best = 1e300;
    for (int e = 0; e < static_cast<int>(s.inner.size()); ++e)
      best = std::min(best, project_onto_segment(p, s.inner.edge_start(e), s.inner.edge_end(e)).distance);
    const ContourAnchor a = nearest_contour_point(s.inner, p);
    EXPECT_NEAR((a.point - p).norm(), best, 1e-9);
  }
  // The hole center is 12 px from all four sides; the lowest edge reaching
  // that distance supplies the point.
  const Vec2 center(32, 32);
  const ContourAnchor c = nearest_contour_point(s.inner, center);
  Vec2 first(-1, -1);
  for (int e = 0; e < static_cast<int>(s.inner.size()); ++e) {
    const SegmentProjection sp = project_onto_segment(center, s.inner.edge_start(e), s.inner.edge_end(e));
    if (std::abs(sp.distance - 12.0) < 1e-9) {
      first = sp.point;
      break;
    }
  }
  EXPECT_EQ(c.point, first);
  EXPECT_EQ(nearest_contour_point(s.inner, center).edge, c.edge);
}

TEST(OcclusionMask, StripOverSquareAnnulusIsClosedForm) {
  const BinaryMask shoe = square_annulus();
  const BinaryMask leg = strip(28, 36, 0, 25);
  const OcclusionResult r = generate_occlusion(shoe, leg);
  ASSERT_TRUE(r.occluded);
  for (int y = 0; y < kSize; ++y)
    for (int x = 0; x < kSize; ++x) EXPECT_EQ(r.mask.at(x, y), x >= 28 && x <= 36 && y >= 10 && y <= 19) << x << "," << y;
  EXPECT_EQ(r.mask.count(), 90u);
}

TEST(OcclusionMask, DeterministicAndSelfIntersectionRejected) {
  const BinaryMask shoe = square_annulus();
  const BinaryMask leg = strip(28, 36, 0, 25);
  EXPECT_EQ(generate_occlusion(shoe, leg).mask, generate_occlusion(shoe, leg).mask);

  const Silhouettes s = extract_silhouettes(shoe);
  const auto c = mask_contour_intersections(leg, s.outer);
  ASSERT_TRUE(c.has_value());
  const ContourAnchor n0 = nearest_contour_point(s.inner, c->m0.point);
  const ContourAnchor n1 = nearest_contour_point(s.inner, c->m1.point);
  // Swapping the inner anchors crosses the two connecting segments.
  try {
    build_occlusion_mask(c->m0, n1, c->m1, n0, s.outer, s.inner, kSize, kSize, &leg);
    FAIL();
  } catch (const DegenerateGeometryError& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_geometry);
    EXPECT_FALSE(e.polygon().empty());
  }
}

TEST(OcclusionMask, SubsetOfBandOnEllipseConfigurations) {
  Rng rng(82);
  int occluded = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double cx = 32 + rng.uniform(-3, 3), cy = 36 + rng.uniform(-3, 3);
    const double a = rng.uniform(20, 26), b = rng.uniform(14, 18);
    const double hx = cx + rng.uniform(-2, 2), hy = cy - rng.uniform(2, 5);
    const double ha = a * 0.4, hb = b * 0.45;
    const double angle = rng.uniform(-0.5, 0.5), half = rng.uniform(3, 6);
    BinaryMask shoe(kSize, kSize), leg(kSize, kSize);
    const Vec2 dir(std::sin(angle), -std::cos(angle));
    for (int y = 0; y < kSize; ++y)
      for (int x = 0; x < kSize; ++x) {
        const double u = (x - cx) / a, v = (y - cy) / b;
        const double hu = (x - hx) / ha, hv = (y - hy) / hb;
        if (u * u + v * v <= 1 && hu * hu + hv * hv > 1) shoe.set(x, y);
        const Vec2 d(x - hx, y - hy);
        const double along = d.dot(dir), across = std::abs(d.x() * dir.y() - d.y() * dir.x());
        if (along >= 0 && across <= half) leg.set(x, y);
      }
    const OcclusionResult r = generate_occlusion(shoe, leg);
    occluded += r.occluded;
    for (int y = 0; y < kSize; ++y)
      for (int x = 0; x < kSize; ++x)
        if (r.mask.at(x, y)) EXPECT_TRUE(shoe.at(x, y)) << trial << ": " << x << "," << y;
  }
  EXPECT_EQ(occluded, 20);
}
