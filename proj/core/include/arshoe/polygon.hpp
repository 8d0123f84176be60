#pragma once

#include <span>
#include <vector>

#include "arshoe/geom.hpp"
#include "arshoe/raster.hpp"

namespace arshoe {

/// Closed polygon; the last->first edge is implicit. Pixel (x, y) has its
/// center at the integer coordinate (x, y).
using Polygon = std::vector<Vec2>;

/// Tolerance for "point lies on an edge" in pixel units.
inline constexpr double kBoundaryEps = 1e-9;

/// Shoelace area; positive when vertices run counterclockwise in (x, y)
/// with y treated as a conventional upward axis.
double signed_area(std::span<const Vec2> poly);
double perimeter(std::span<const Vec2> poly);

struct SegmentProjection {
  double t = 0.0;     ///< parameter along a->b, clamped to [0, 1]
  Vec2 point;         ///< closest point on the segment
  double distance = 0.0;
};
SegmentProjection project_onto_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// Closed-set test: points on an edge (within kBoundaryEps) are inside.
bool point_in_polygon(std::span<const Vec2> poly, const Vec2& p);

/// True when the polygon has >= 3 vertices, no zero-length edges and no two
/// edges touch except adjacent edges at their shared vertex.
bool is_simple(std::span<const Vec2> poly);

/// ORs the closed polygon region into `mask` by scanline. Pixels selected
/// are exactly those for which point_in_polygon holds at the pixel center.
void fill_polygon(std::span<const Vec2> poly, BinaryMask& mask);
BinaryMask rasterize_polygon(std::span<const Vec2> poly, int width, int height);

/// Convex hull (Andrew's monotone chain), counterclockwise, no collinear points.
Polygon convex_hull(std::vector<Vec2> points);

}  // namespace arshoe
