#pragma once

#include <optional>

#include "arshoe/polygon.hpp"
#include "arshoe/raster.hpp"

namespace arshoe {

/// Closed boundary through pixel centers, oriented counterclockwise in the
/// sense of a positive signed_area() on raw pixel coordinates (the order
/// Moore tracing produces on a y-down grid).
struct Contour {
  std::vector<Vec2> vertices;

  std::size_t size() const { return vertices.size(); }
  const Vec2& edge_start(int e) const { return vertices[static_cast<std::size_t>(e)]; }
  const Vec2& edge_end(int e) const { return vertices[(static_cast<std::size_t>(e) + 1) % vertices.size()]; }
  double edge_length(int e) const { return (edge_end(e) - edge_start(e)).norm(); }
};

/// A point on edge `edge` (vertices[edge] -> vertices[edge + 1]) of a
/// contour the caller keeps alongside the anchor.
struct ContourAnchor {
  int edge = 0;
  double t = 0.0;  ///< in [0, 1)
  Vec2 point = Vec2::Zero();
};

ContourAnchor make_anchor(const Contour& contour, int edge, double t);

struct Silhouettes {
  Contour outer;  ///< S0: boundary pixels of the shoe render
  Contour inner;  ///< S1: boundary pixels of the opening (hole) region
};

/// Outer boundary of the single 4-connected foreground component and the
/// boundary of its single hole (8-connected background), both Moore traced.
/// Throws Errc::topology for zero or several components (or holes) and
/// Errc::missing_opening when the component has no hole.
Silhouettes extract_silhouettes(const BinaryMask& shoe_mask);

/// Pixels inside the closed contour (pixel-center closed-set fill).
BinaryMask fill_contour(const Contour& contour, int width, int height);

struct LegCrossing {
  ContourAnchor m0;  ///< where S0 enters the leg
  ContourAnchor m1;  ///< where S0 leaves the leg; M0 -> M1 is the covered arc
};

/// Leg membership is sampled at each S0 vertex (nearest pixel); a toggle
/// between consecutive vertices places an anchor at that edge's midpoint.
/// Runs covering a single vertex are tangent contacts and ignored. With
/// several runs the longest (by arc length) wins. std::nullopt means the
/// leg does not occlude the shoe.
std::optional<LegCrossing> mask_contour_intersections(const BinaryMask& leg_mask, const Contour& s0);

/// Closest point of `s1` to `p`; ties go to the lowest edge index, then the
/// lowest t.
ContourAnchor nearest_contour_point(const Contour& s1, const Vec2& p);

/// Raised when the assembled occlusion polygon self-intersects.
class DegenerateGeometryError : public Error {
 public:
  DegenerateGeometryError(const std::string& what, Polygon polygon)
      : Error(Errc::degenerate_geometry, what), polygon_(std::move(polygon)) {}
  const Polygon& polygon() const { return polygon_; }

 private:
  Polygon polygon_;
};

/// Points of the contour walked forward (vertex order) or backward from
/// anchor a to anchor b, both endpoints included, consecutive duplicates
/// removed.
std::vector<Vec2> contour_arc(const Contour& contour, const ContourAnchor& a, const ContourAnchor& b, bool forward);

/// The closed polygon M0 -> N0 -> (S1 arc) -> N1 -> M1 -> (S0 arc back to
/// M0). The S1 side is the one whose arc midpoint lies in `leg_mask` when
/// exactly one does, otherwise the shorter one.
Polygon occlusion_polygon(const ContourAnchor& m0, const ContourAnchor& n0, const ContourAnchor& m1,
                          const ContourAnchor& n1, const Contour& s0, const Contour& s1,
                          const BinaryMask* leg_mask = nullptr);

/// Rasterised occlusion polygon restricted to the shoe band (S0 fill minus
/// S1 fill). Throws DegenerateGeometryError for a self-intersecting polygon.
BinaryMask build_occlusion_mask(const ContourAnchor& m0, const ContourAnchor& n0, const ContourAnchor& m1,
                                const ContourAnchor& n1, const Contour& s0, const Contour& s1, int width,
                                int height, const BinaryMask* leg_mask = nullptr);

struct OcclusionResult {
  BinaryMask mask;
  bool occluded = false;
  std::optional<LegCrossing> crossing;
};

/// Whole chain: silhouettes, leg crossings, nearest opening points, mask.
/// An all-zero mask with occluded == false is the no-occlusion outcome.
OcclusionResult generate_occlusion(const BinaryMask& shoe_mask, const BinaryMask& leg_mask);

}  // namespace arshoe
