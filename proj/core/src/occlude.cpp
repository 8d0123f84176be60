#include "arshoe/occlude.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace arshoe {

namespace {

// Clockwise on a y-down grid, starting west.
constexpr std::array<std::array<int, 2>, 8> kRing = {{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

int ring_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kRing[i][0] == dx && kRing[i][1] == dy) return i;
  }
  return -1;
}

// Labels connected components of pixels where `member` holds; returns the
// component count. Labels are 1-based, 0 marks non-members.
template <typename Member>
int label_components(int w, int h, bool eight, Member member, std::vector<int>& labels) {
  labels.assign(static_cast<std::size_t>(w) * h, 0);
  int next = 0;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (labels[idx] || !member(x, y)) continue;
      labels[idx] = ++next;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int i = 0; i < 8; ++i) {
          if (!eight && (i % 2 == 1)) continue;  // odd ring slots are diagonals
          const int nx = cx + kRing[i][0], ny = cy + kRing[i][1];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
          if (labels[nidx] || !member(nx, ny)) continue;
          labels[nidx] = next;
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  return next;
}

// Moore-neighbour boundary trace of the region where `inside` holds,
// starting at its first pixel in raster order. Stops when the first move
// would be repeated.
template <typename Inside>
Contour moore_trace(int sx, int sy, Inside inside) {
  Contour c;
  c.vertices.emplace_back(sx, sy);
  int px = sx, py = sy;
  int back = 0;  // west of the raster-first pixel is outside
  int first_x = 0, first_y = 0;
  bool have_first = false;
  const std::size_t limit = 1u << 24;
  while (c.vertices.size() < limit) {
    int found = -1;
    for (int i = 1; i <= 8; ++i) {
      const int d = (back + i) % 8;
      if (inside(px + kRing[d][0], py + kRing[d][1])) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    const int qx = px + kRing[found][0], qy = py + kRing[found][1];
    if (have_first && px == sx && py == sy && qx == first_x && qy == first_y) break;
    if (!have_first) {
      first_x = qx;
      first_y = qy;
      have_first = true;
    }
    const int prev = (found + 7) % 8;
    const int bx = px + kRing[prev][0], by = py + kRing[prev][1];
    back = ring_index(bx - qx, by - qy);
    px = qx;
    py = qy;
    c.vertices.emplace_back(px, py);
  }
  // The walk ends on the start pixel; drop the duplicate.
  if (c.vertices.size() > 1 && c.vertices.back() == c.vertices.front()) c.vertices.pop_back();
  if (signed_area(c.vertices) < 0) std::reverse(c.vertices.begin() + 1, c.vertices.end());
  return c;
}

void push_unique(std::vector<Vec2>& pts, const Vec2& p) {
  if (pts.empty() || (pts.back() - p).norm() > kBoundaryEps) pts.push_back(p);
}

double arc_length(const std::vector<Vec2>& pts) {
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) acc += (pts[i] - pts[i - 1]).norm();
  return acc;
}

Vec2 arc_midpoint(const std::vector<Vec2>& pts) {
  const double half = 0.5 * arc_length(pts);
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double seg = (pts[i] - pts[i - 1]).norm();
    if (acc + seg >= half && seg > 0.0) return pts[i - 1] + (half - acc) / seg * (pts[i] - pts[i - 1]);
    acc += seg;
  }
  return pts.empty() ? Vec2(Vec2::Zero()) : pts.back();
}

bool mask_at(const BinaryMask& m, const Vec2& p) {
  return m.get(static_cast<int>(std::lround(p.x())), static_cast<int>(std::lround(p.y())));
}

}  // namespace

ContourAnchor make_anchor(const Contour& contour, int edge, double t) {
  const int n = static_cast<int>(contour.size());
  edge = ((edge % n) + n) % n;
  if (t >= 1.0) {
    edge = (edge + 1) % n;
    t = 0.0;
  }
  ContourAnchor a;
  a.edge = edge;
  a.t = t;
  a.point = t == 0.0 ? contour.edge_start(edge)
                     : Vec2(contour.edge_start(edge) + t * (contour.edge_end(edge) - contour.edge_start(edge)));
  return a;
}

Silhouettes extract_silhouettes(const BinaryMask& shoe) {
  const int w = shoe.width(), h = shoe.height();
  std::vector<int> fg;
  const int n_fg = label_components(w, h, false, [&](int x, int y) { return shoe.at(x, y); }, fg);
  if (n_fg != 1) {
    throw Error(Errc::topology, "shoe mask has " + std::to_string(n_fg) + " foreground components, expected 1");
  }

  std::vector<int> bg;
  const int n_bg = label_components(w, h, true, [&](int x, int y) { return !shoe.at(x, y); }, bg);
  std::vector<bool> exterior(static_cast<std::size_t>(n_bg) + 1, false);
  for (int x = 0; x < w; ++x) {
    exterior[bg[x]] = true;
    exterior[bg[static_cast<std::size_t>(h - 1) * w + x]] = true;
  }
  for (int y = 0; y < h; ++y) {
    exterior[bg[static_cast<std::size_t>(y) * w]] = true;
    exterior[bg[static_cast<std::size_t>(y) * w + w - 1]] = true;
  }
  int hole = 0, holes = 0;
  for (int l = 1; l <= n_bg; ++l) {
    if (!exterior[l]) {
      ++holes;
      if (!hole) hole = l;
    }
  }
  if (holes == 0) throw Error(Errc::missing_opening, "shoe mask has no interior opening");
  if (holes > 1) throw Error(Errc::topology, "shoe mask has " + std::to_string(holes) + " openings, expected 1");

  auto first_pixel = [&](auto pred) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (pred(x, y)) return std::pair(x, y);
      }
    }
    return std::pair(-1, -1);
  };
  auto in_fg = [&](int x, int y) { return shoe.get(x, y); };
  auto in_hole = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && bg[static_cast<std::size_t>(y) * w + x] == hole;
  };

  Silhouettes s;
  const auto [fx, fy] = first_pixel(in_fg);
  s.outer = moore_trace(fx, fy, in_fg);
  const auto [hx, hy] = first_pixel(in_hole);
  s.inner = moore_trace(hx, hy, in_hole);
  if (s.outer.size() < 3 || s.inner.size() < 3) {
    throw Error(Errc::topology, "silhouette contour has fewer than 3 vertices");
  }
  return s;
}

BinaryMask fill_contour(const Contour& contour, int width, int height) {
  return rasterize_polygon(contour.vertices, width, height);
}

std::optional<LegCrossing> mask_contour_intersections(const BinaryMask& leg, const Contour& s0) {
  const int n = static_cast<int>(s0.size());
  if (n < 3) return std::nullopt;
  std::vector<bool> in(static_cast<std::size_t>(n));
  int inside_count = 0;
  for (int i = 0; i < n; ++i) {
    in[i] = mask_at(leg, s0.vertices[i]);
    inside_count += in[i];
  }
  if (inside_count == 0 || inside_count == n) return std::nullopt;

  std::optional<LegCrossing> best;
  double best_len = -1.0;
  for (int i = 0; i < n; ++i) {
    // Start of a run: vertex i inside, i-1 outside.
    if (!in[i] || in[(i + n - 1) % n]) continue;
    int j = i;
    double len = 0.0;
    while (in[(j + 1) % n]) {
      len += s0.edge_length(j);
      j = (j + 1) % n;
    }
    if (j == i) continue;  // tangent contact
    const int enter = (i + n - 1) % n;
    len += 0.5 * s0.edge_length(enter) + 0.5 * s0.edge_length(j);
    if (len > best_len) {
      best_len = len;
      best = LegCrossing{make_anchor(s0, enter, 0.5), make_anchor(s0, j, 0.5)};
    }
  }
  return best;
}

ContourAnchor nearest_contour_point(const Contour& s1, const Vec2& p) {
  const int n = static_cast<int>(s1.size());
  ContourAnchor best;
  double best_d = std::numeric_limits<double>::infinity();
  bool have = false;
  for (int e = 0; e < n; ++e) {
    const SegmentProjection proj = project_onto_segment(p, s1.edge_start(e), s1.edge_end(e));
    ContourAnchor cand = make_anchor(s1, e, proj.t);
    const double d = (cand.point - p).norm();
    const bool better = !have || d < best_d - 1e-12 ||
                        (std::abs(d - best_d) <= 1e-12 && (cand.edge < best.edge || (cand.edge == best.edge && cand.t < best.t)));
    if (better) {
      best = cand;
      best_d = d;
      have = true;
    }
  }
  return best;
}

std::vector<Vec2> contour_arc(const Contour& c, const ContourAnchor& a, const ContourAnchor& b, bool forward) {
  const int n = static_cast<int>(c.size());
  std::vector<Vec2> pts;
  push_unique(pts, a.point);
  if (forward) {
    if (!(a.edge == b.edge && a.t <= b.t)) {
      int v = (a.edge + 1) % n;
      for (;;) {
        push_unique(pts, c.vertices[v]);
        if (v == b.edge) break;
        v = (v + 1) % n;
      }
    }
  } else {
    if (!(a.edge == b.edge && a.t >= b.t)) {
      int v = a.edge;
      for (;;) {
        push_unique(pts, c.vertices[v]);
        if (v == (b.edge + 1) % n) break;
        v = (v + n - 1) % n;
      }
    }
  }
  push_unique(pts, b.point);
  return pts;
}

Polygon occlusion_polygon(const ContourAnchor& m0, const ContourAnchor& n0, const ContourAnchor& m1,
                          const ContourAnchor& n1, const Contour& s0, const Contour& s1, const BinaryMask* leg) {
  const auto fwd = contour_arc(s1, n0, n1, true);
  const auto bwd = contour_arc(s1, n0, n1, false);
  bool use_fwd = arc_length(fwd) <= arc_length(bwd);
  if (leg) {
    const bool fin = mask_at(*leg, arc_midpoint(fwd));
    const bool bin = mask_at(*leg, arc_midpoint(bwd));
    if (fin != bin) use_fwd = fin;
  }

  Polygon poly;
  push_unique(poly, m0.point);
  for (const Vec2& p : use_fwd ? fwd : bwd) push_unique(poly, p);
  for (const Vec2& p : contour_arc(s0, m1, m0, false)) push_unique(poly, p);
  while (poly.size() > 1 && (poly.back() - poly.front()).norm() <= kBoundaryEps) poly.pop_back();
  return poly;
}

BinaryMask build_occlusion_mask(const ContourAnchor& m0, const ContourAnchor& n0, const ContourAnchor& m1,
                                const ContourAnchor& n1, const Contour& s0, const Contour& s1, int width, int height,
                                const BinaryMask* leg) {
  Polygon poly = occlusion_polygon(m0, n0, m1, n1, s0, s1, leg);
  if (!is_simple(poly)) throw DegenerateGeometryError("occlusion polygon self-intersects", std::move(poly));

  BinaryMask mask = rasterize_polygon(poly, width, height);
  const BinaryMask outer = fill_contour(s0, width, height);
  const BinaryMask inner = fill_contour(s1, width, height);
  auto& bits = mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = bits[i] && outer.bits()[i] && !inner.bits()[i];
  return mask;
}

OcclusionResult generate_occlusion(const BinaryMask& shoe_mask, const BinaryMask& leg_mask) {
  OcclusionResult out;
  out.mask = BinaryMask(shoe_mask.width(), shoe_mask.height());
  const Silhouettes s = extract_silhouettes(shoe_mask);
  out.crossing = mask_contour_intersections(leg_mask, s.outer);
  if (!out.crossing) return out;
  const ContourAnchor n0 = nearest_contour_point(s.inner, out.crossing->m0.point);
  const ContourAnchor n1 = nearest_contour_point(s.inner, out.crossing->m1.point);
  out.mask = build_occlusion_mask(out.crossing->m0, n0, out.crossing->m1, n1, s.outer, s.inner, shoe_mask.width(),
                                  shoe_mask.height(), &leg_mask);
  out.occluded = true;
  return out;
}

}  // namespace arshoe
