#include "arshoe/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace arshoe {

namespace {

// Vertex offset of a 1-D parabola through (-1, l), (0, c), (1, r).
double parabola_offset(double l, double c, double r) {
  const double denom = l - 2.0 * c + r;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

double refine_axis(double l, double c, double r) {
  if (l > 0.0 && c > 0.0 && r > 0.0) return parabola_offset(std::log(l), std::log(c), std::log(r));
  return parabola_offset(l, c, r);
}

}  // namespace

std::vector<PeakCandidate> extract_peaks(const Tensor& heatmap, double threshold, double nms_radius) {
  std::vector<PeakCandidate> out;
  const int h = heatmap.height(), w = heatmap.width();
  const double r2 = nms_radius * nms_radius;
  struct Local {
    int x, y;
    float v;
  };
  std::vector<Local> local;

  for (int c = 0; c < heatmap.channels(); ++c) {
    local.clear();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const float v = heatmap.at(c, y, x);
        if (!(v > threshold)) continue;
        bool is_max = true;
        for (int dy = -1; dy <= 1 && is_max; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (heatmap.at(c, ny, nx) > v) {
              is_max = false;
              break;
            }
          }
        }
        if (is_max) local.push_back({x, y, v});
      }
    }
    std::stable_sort(local.begin(), local.end(), [](const Local& a, const Local& b) { return a.v > b.v; });

    std::vector<Local> kept;
    for (const Local& m : local) {
      const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Local& k) {
        const double dx = k.x - m.x, dy = k.y - m.y;
        return dx * dx + dy * dy <= r2;
      });
      if (!suppressed) kept.push_back(m);
    }

    for (const Local& m : kept) {
      double ox = 0.0, oy = 0.0;
      if (m.x > 0 && m.x < w - 1) ox = refine_axis(heatmap.at(c, m.y, m.x - 1), m.v, heatmap.at(c, m.y, m.x + 1));
      if (m.y > 0 && m.y < h - 1) oy = refine_axis(heatmap.at(c, m.y - 1, m.x), m.v, heatmap.at(c, m.y + 1, m.x));
      PeakCandidate p;
      p.channel = c;
      p.position = Vec2(std::clamp(m.x + ox, 0.0, w - 1.0), std::clamp(m.y + oy, 0.0, h - 1.0));
      p.score = m.v;
      out.push_back(p);
    }
  }
  return out;
}

Vec2 sample_paf(const Tensor& pafmap, int edge, const Vec2& p) {
  const int w = pafmap.width(), h = pafmap.height();
  const double x = std::clamp(p.x(), 0.0, w - 1.0);
  const double y = std::clamp(p.y(), 0.0, h - 1.0);
  const int x0 = std::min(static_cast<int>(x), w - 2 < 0 ? 0 : w - 2);
  const int y0 = std::min(static_cast<int>(y), h - 2 < 0 ? 0 : h - 2);
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0, fy = y - y0;
  Vec2 out;
  for (int k = 0; k < 2; ++k) {
    const int c = 2 * edge + k;
    const double top = (1 - fx) * pafmap.at(c, y0, x0) + fx * pafmap.at(c, y0, x1);
    const double bot = (1 - fx) * pafmap.at(c, y1, x0) + fx * pafmap.at(c, y1, x1);
    out[k] = (1 - fy) * top + fy * bot;
  }
  return out;
}

double connection_score(const Tensor& pafmap, int edge, const Vec2& a, const Vec2& b, int n_samples) {
  if (n_samples < 2) throw Error(Errc::invalid_argument, "connection_score needs at least 2 samples");
  const Vec2 d = b - a;
  const double len = d.norm();
  if (len < 1e-9) throw Error(Errc::undefined_direction, "connection endpoints coincide");
  const Vec2 u = d / len;
  double sum = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double t = static_cast<double>(i) / (n_samples - 1);
    sum += sample_paf(pafmap, edge, a + t * d).dot(u);
  }
  return sum / n_samples;
}

std::vector<CandidateGroup> group_candidates(std::span<const PeakCandidate> candidates, const Tensor& pafmap,
                                             const Skeleton& skeleton, double min_score, int n_samples) {
  struct Connection {
    double score;
    int edge;
    int a, b;
  };
  std::vector<Connection> accepted;
  const int n = static_cast<int>(candidates.size());

  for (int e = 0; e < static_cast<int>(skeleton.edges.size()); ++e) {
    const auto [ka, kb] = skeleton.edges[e];
    std::vector<Connection> pairs;
    for (int i = 0; i < n; ++i) {
      if (candidates[i].channel != ka) continue;
      for (int j = 0; j < n; ++j) {
        if (candidates[j].channel != kb) continue;
        if ((candidates[i].position - candidates[j].position).norm() < 1e-9) continue;
        const double s = connection_score(pafmap, e, candidates[i].position, candidates[j].position, n_samples);
        if (s >= min_score) pairs.push_back({s, e, i, j});
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Connection& x, const Connection& y) { return x.score > y.score; });
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (const Connection& c : pairs) {
      if (used[c.a] || used[c.b]) continue;
      used[c.a] = used[c.b] = true;
      accepted.push_back(c);
    }
  }

  // Union-find whose roots carry the slot occupancy of their component.
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<CandidateGroup> slots(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    slots[i].fill(-1);
    slots[i][candidates[i].channel] = i;
  }
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  std::stable_sort(accepted.begin(), accepted.end(),
                   [](const Connection& x, const Connection& y) { return x.score > y.score; });
  for (const Connection& c : accepted) {
    const int ra = find(c.a), rb = find(c.b);
    if (ra == rb) continue;
    bool clash = false;
    for (int k = 0; k < kNumKeypoints; ++k) clash |= slots[ra][k] >= 0 && slots[rb][k] >= 0;
    if (clash) continue;
    const int root = std::min(ra, rb), other = std::max(ra, rb);
    for (int k = 0; k < kNumKeypoints; ++k) {
      if (slots[other][k] >= 0) slots[root][k] = slots[other][k];
    }
    parent[other] = root;
  }

  std::vector<CandidateGroup> groups;
  for (int i = 0; i < n; ++i) {
    if (find(i) == i) groups.push_back(slots[i]);
  }

  auto stats = [&](const CandidateGroup& g) {
    int count = 0;
    double sum = 0.0;
    int first = n;
    for (int idx : g) {
      if (idx < 0) continue;
      ++count;
      sum += candidates[idx].score;
      first = std::min(first, idx);
    }
    return std::tuple(count, count ? sum / count : 0.0, first);
  };
  std::stable_sort(groups.begin(), groups.end(), [&](const CandidateGroup& x, const CandidateGroup& y) {
    const auto [cx, mx, fx] = stats(x);
    const auto [cy, my, fy] = stats(y);
    if (cx != cy) return cx > cy;
    if (mx != my) return mx > my;
    return fx < fy;
  });
  return groups;
}

std::vector<FootInstance> group_keypoints(std::span<const PeakCandidate> candidates, const Tensor& pafmap,
                                          const Skeleton& skeleton, double min_score, int n_samples) {
  std::vector<FootInstance> out;
  for (const CandidateGroup& g : group_candidates(candidates, pafmap, skeleton, min_score, n_samples)) {
    FootInstance inst;
    for (int k = 0; k < kNumKeypoints; ++k) {
      if (g[k] < 0) continue;
      inst.keypoints[k] = candidates[g[k]].position;
      inst.confidences[k] = candidates[g[k]].score;
    }
    out.push_back(inst);
  }
  return out;
}

std::vector<FootInstance> decode_instances(const Tensor& heatmap, const Tensor& pafmap, const Skeleton& skeleton,
                                           const DecodeConfig& cfg) {
  const auto peaks = extract_peaks(heatmap, cfg.threshold, cfg.nms_radius);
  return group_keypoints(peaks, pafmap, skeleton, cfg.min_score, cfg.n_samples);
}

}  // namespace arshoe
