#include <gtest/gtest.h>

#include "arshoe/polygon.hpp"
#include "arshoe/rng.hpp"

using namespace arshoe;

namespace {

// Even-odd test with explicit on-edge check, written independently.
bool oracle_inside(const Polygon& poly, const Vec2& p) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2 ab = b - a;
    const double cross = ab.x() * (p.y() - a.y()) - ab.y() * (p.x() - a.x());
    const double dot = (p - a).dot(ab);
    if (std::abs(cross) <= 1e-9 * ab.norm() && dot >= -1e-12 && dot <= ab.squaredNorm() + 1e-12) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((poly[i].y() > p.y()) != (poly[j].y() > p.y())) {
      const double x = poly[j].x() + (p.y() - poly[j].y()) * (poly[i].x() - poly[j].x()) / (poly[i].y() - poly[j].y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

TEST(Polygon, SignedAreaOfSquare) {
  const Polygon sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_DOUBLE_EQ(signed_area(sq), 4.0);
  const Polygon rev(sq.rbegin(), sq.rend());
  EXPECT_DOUBLE_EQ(signed_area(rev), -4.0);
  EXPECT_DOUBLE_EQ(perimeter(sq), 8.0);
}

TEST(Polygon, BoundaryCountsAsInside) {
  const Polygon sq{{10, 10}, {20, 10}, {20, 20}, {10, 20}};
  EXPECT_TRUE(point_in_polygon(sq, {10, 10}));
  EXPECT_TRUE(point_in_polygon(sq, {15, 20}));
  EXPECT_TRUE(point_in_polygon(sq, {15, 15}));
  EXPECT_FALSE(point_in_polygon(sq, {9.99, 15}));
  EXPECT_FALSE(point_in_polygon(sq, {21, 21}));
}

TEST(Polygon, RectangleFillHas121Pixels) {
  const Polygon sq{{10, 10}, {20, 10}, {20, 20}, {10, 20}};
  const BinaryMask m = rasterize_polygon(sq, 64, 64);
  EXPECT_EQ(m.count(), 121u);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) ASSERT_EQ(m.at(x, y), oracle_inside(sq, Vec2(x, y)));
  }
}

TEST(Polygon, FillMatchesBruteForceOnRandomPolygons) {
  Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    // Star-shaped polygon around a random center: always simple.
    const Vec2 c(rng.uniform(10, 54), rng.uniform(10, 54));
    const int n = 3 + static_cast<int>(rng.below(10));
    Polygon poly;
    for (int i = 0; i < n; ++i) {
      const double th = 2 * 3.141592653589793 * (i + rng.uniform(0.0, 0.8)) / n;
      const double r = rng.uniform(3, 30);
      // Snap some vertices to integers to exercise boundary hits.
      Vec2 v = c + r * Vec2(std::cos(th), std::sin(th));
      if (rng.uniform() < 0.5) v = v.array().round();
      poly.push_back(v);
    }
    if (!is_simple(poly)) continue;
    const BinaryMask m = rasterize_polygon(poly, 64, 64);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        ASSERT_EQ(m.at(x, y), point_in_polygon(poly, Vec2(x, y))) << trial << " " << x << "," << y;
        ASSERT_EQ(m.at(x, y), oracle_inside(poly, Vec2(x, y))) << trial << " " << x << "," << y;
      }
    }
  }
}

TEST(Polygon, SimplicityChecks) {
  EXPECT_TRUE(is_simple(Polygon{{0, 0}, {4, 0}, {4, 4}, {0, 4}}));
  EXPECT_FALSE(is_simple(Polygon{{0, 0}, {4, 4}, {4, 0}, {0, 4}}));  // bow tie
  EXPECT_FALSE(is_simple(Polygon{{0, 0}, {4, 0}}));
  EXPECT_FALSE(is_simple(Polygon{{0, 0}, {4, 0}, {4, 0}, {0, 4}}));
}

TEST(Polygon, ConvexHullDropsInteriorAndCollinear) {
  const Polygon hull = convex_hull({{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}});
  EXPECT_EQ(hull.size(), 4u);
  EXPECT_DOUBLE_EQ(signed_area(hull), 4.0);
}

TEST(Polygon, SegmentProjection) {
  const auto p = project_onto_segment({1, 1}, {0, 0}, {2, 0});
  EXPECT_DOUBLE_EQ(p.t, 0.5);
  EXPECT_DOUBLE_EQ(p.distance, 1.0);
  EXPECT_DOUBLE_EQ(project_onto_segment({-3, 0}, {0, 0}, {2, 0}).t, 0.0);
}
