#include "arshoe/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace arshoe {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({1.0, (b - a).cwiseAbs().maxCoeff(), (c - a).cwiseAbs().maxCoeff()});
  if (std::abs(v) <= 1e-12 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  return project_onto_segment(p, a, b).distance <= kBoundaryEps;
}

bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  return on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d);
}

}  // namespace

double signed_area(std::span<const Vec2> poly) {
  double acc = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) acc += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * acc;
}

double perimeter(std::span<const Vec2> poly) {
  double acc = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) acc += (poly[(i + 1) % n] - poly[i]).norm();
  return acc;
}

SegmentProjection project_onto_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  SegmentProjection out;
  out.t = t;
  out.point = t == 1.0 ? b : Vec2(a + t * ab);
  out.distance = (p - out.point).norm();
  return out;
}

bool point_in_polygon(std::span<const Vec2> poly, const Vec2& p) {
  const std::size_t n = poly.size();
  if (n == 0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(p, poly[i], poly[(i + 1) % n])) return true;
  }
  // Crossing number with the half-open rule used by fill_polygon.
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if ((a.y() <= p.y() && p.y() < b.y()) || (b.y() <= p.y() && p.y() < a.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x > p.x()) inside = !inside;
    }
  }
  return inside;
}

bool is_simple(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((poly[(i + 1) % n] - poly[i]).norm() <= kBoundaryEps) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2& c = poly[j];
      const Vec2& d = poly[(j + 1) % n];
      const bool next = j == i + 1;
      const bool prev = i == 0 && j == n - 1;
      if (next) {
        // Shared vertex b == c: reject only a fold back along a->b.
        if (on_segment(d, a, b) || on_segment(a, c, d)) return false;
        continue;
      }
      if (prev) {
        // Shared vertex a == d.
        if (on_segment(c, a, b) || on_segment(b, c, d)) return false;
        continue;
      }
      if (segments_touch(a, b, c, d)) return false;
    }
  }
  return true;
}

void fill_polygon(std::span<const Vec2> poly, BinaryMask& mask) {
  const std::size_t n = poly.size();
  if (n == 0 || mask.empty()) return;
  double ymin = poly[0].y(), ymax = poly[0].y();
  for (const Vec2& v : poly) {
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  const int row_lo = std::max(0, static_cast<int>(std::ceil(ymin - kBoundaryEps)));
  const int row_hi = std::min(mask.height() - 1, static_cast<int>(std::floor(ymax + kBoundaryEps)));
  const int w = mask.width();

  auto fill_span = [&](int row, double x0, double x1) {
    const int lo = std::max(0, static_cast<int>(std::ceil(x0 - kBoundaryEps)));
    const int hi = std::min(w - 1, static_cast<int>(std::floor(x1 + kBoundaryEps)));
    for (int x = lo; x <= hi; ++x) mask.set(x, row);
  };

  std::vector<double> xs;
  for (int row = row_lo; row <= row_hi; ++row) {
    const double y = row;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % n];
      if ((a.y() <= y && y < b.y()) || (b.y() <= y && y < a.y())) {
        xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) fill_span(row, xs[k], xs[k + 1]);

    // Boundary pixels the half-open interior rule leaves out. Pixel centers
    // on the row are tested against each edge with the same distance
    // criterion point_in_polygon uses.
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % n];
      if (y < std::min(a.y(), b.y()) - kBoundaryEps || y > std::max(a.y(), b.y()) + kBoundaryEps) continue;
      double x0, x1;
      if (std::abs(b.y() - a.y()) <= kBoundaryEps) {
        x0 = std::min(a.x(), b.x());
        x1 = std::max(a.x(), b.x());
      } else {
        const double t = std::clamp((y - a.y()) / (b.y() - a.y()), 0.0, 1.0);
        x0 = x1 = a.x() + t * (b.x() - a.x());
      }
      const int lo = std::max(0, static_cast<int>(std::ceil(x0 - 1.0)));
      const int hi = std::min(w - 1, static_cast<int>(std::floor(x1 + 1.0)));
      for (int x = lo; x <= hi; ++x) {
        if (!mask.at(x, row) && on_segment(Vec2(x, y), a, b)) mask.set(x, row);
      }
    }
  }
}

BinaryMask rasterize_polygon(std::span<const Vec2> poly, int width, int height) {
  BinaryMask mask(width, height);
  fill_polygon(poly, mask);
  return mask;
}

Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace arshoe
