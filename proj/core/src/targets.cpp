#include "arshoe/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace arshoe {

int FootInstance::completeness() const {
  return static_cast<int>(std::count_if(keypoints.begin(), keypoints.end(), [](const auto& k) { return k.has_value(); }));
}

double FootInstance::mean_confidence() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& c : confidences) {
    if (c) {
      sum += *c;
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

Vec2 FootInstance::centroid() const {
  Vec2 sum = Vec2::Zero();
  int n = 0;
  for (const auto& k : keypoints) {
    if (k) {
      sum += *k;
      ++n;
    }
  }
  return n ? Vec2(sum / n) : Vec2(Vec2::Zero());
}

FootInstance FootInstance::from_points(const std::array<Vec2, kNumKeypoints>& pts) {
  FootInstance inst;
  for (int i = 0; i < kNumKeypoints; ++i) {
    inst.keypoints[i] = pts[i];
    inst.confidences[i] = 1.0;
  }
  return inst;
}

Skeleton Skeleton::foot() { return {{{1, 3}, {1, 4}, {3, 5}, {4, 6}, {5, 0}, {6, 2}, {7, 1}}}; }

void Skeleton::validate() const {
  if (edges.size() != static_cast<std::size_t>(kNumEdges)) {
    throw Error(Errc::config, "skeleton needs exactly 7 edges, got " + std::to_string(edges.size()));
  }
  std::array<int, kNumKeypoints> parent;
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= kNumKeypoints || b >= kNumKeypoints || a == b) {
      throw Error(Errc::config, "skeleton edge (" + std::to_string(a) + "," + std::to_string(b) + ") is invalid");
    }
    parent[find(a)] = find(b);
  }
  for (int i = 1; i < kNumKeypoints; ++i) {
    if (find(i) != find(0)) throw Error(Errc::config, "skeleton edges do not connect all 8 keypoints");
  }
}

Tensor encode_heatmaps(std::span<const FootInstance> instances, double sigma, int size) {
  if (!(sigma > 0.0)) throw Error(Errc::invalid_argument, "heatmap sigma must be positive");
  Tensor out(kHeatmapChannels, size, size);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (const FootInstance& inst : instances) {
    for (int c = 0; c < kHeatmapChannels; ++c) {
      if (!inst.keypoints[c]) continue;
      const Vec2 k = *inst.keypoints[c];
      for (int y = 0; y < size; ++y) {
        const double dy2 = (y - k.y()) * (y - k.y());
        for (int x = 0; x < size; ++x) {
          const double d2 = (x - k.x()) * (x - k.x()) + dy2;
          float& cell = out.at(c, y, x);
          cell = std::max(cell, static_cast<float>(std::exp(-d2 * inv)));
        }
      }
    }
  }
  return out;
}

PafEncoding encode_pafs(std::span<const FootInstance> instances, const Skeleton& skeleton, double half_width,
                        int size) {
  if (!(half_width > 0.0)) throw Error(Errc::invalid_argument, "PAF half width must be positive");
  PafEncoding result;
  result.field = Tensor(2 * static_cast<int>(skeleton.edges.size()), size, size);
  std::vector<int> count(static_cast<std::size_t>(size) * size);

  for (std::size_t e = 0; e < skeleton.edges.size(); ++e) {
    std::fill(count.begin(), count.end(), 0);
    const auto [ia, ib] = skeleton.edges[e];
    const int cx = 2 * static_cast<int>(e);
    for (std::size_t n = 0; n < instances.size(); ++n) {
      const auto& pa = instances[n].keypoints[ia];
      const auto& pb = instances[n].keypoints[ib];
      if (!pa || !pb) continue;
      const Vec2 d = *pb - *pa;
      const double len = d.norm();
      if (len < 1e-9) {
        result.degenerate_edges.emplace_back(static_cast<int>(n), static_cast<int>(e));
        continue;
      }
      const Vec2 u = d / len;
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min(pa->x(), pb->x()) - half_width)));
      const int x1 = std::min(size - 1, static_cast<int>(std::ceil(std::max(pa->x(), pb->x()) + half_width)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min(pa->y(), pb->y()) - half_width)));
      const int y1 = std::min(size - 1, static_cast<int>(std::ceil(std::max(pa->y(), pb->y()) + half_width)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          if (project_onto_segment(Vec2(x, y), *pa, *pb).distance > half_width) continue;
          result.field.at(cx, y, x) += static_cast<float>(u.x());
          result.field.at(cx + 1, y, x) += static_cast<float>(u.y());
          ++count[static_cast<std::size_t>(y) * size + x];
        }
      }
    }
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        const int k = count[static_cast<std::size_t>(y) * size + x];
        if (k > 1) {
          result.field.at(cx, y, x) /= static_cast<float>(k);
          result.field.at(cx + 1, y, x) /= static_cast<float>(k);
        }
      }
    }
  }
  return result;
}

Tensor encode_segmentation(std::span<const Polygon> leg_polygons, std::span<const Polygon> foot_polygons, int size) {
  Tensor out(kSegChannels, size, size);
  auto encode_channel = [&](std::span<const Polygon> polys, int channel) {
    BinaryMask mask(size, size);
    for (const Polygon& poly : polys) {
      if (!is_simple(poly)) throw Error(Errc::invalid_geometry, "segmentation polygon is not simple");
      fill_polygon(poly, mask);
    }
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        if (mask.at(x, y)) out.at(channel, y, x) = 1.0f;
      }
    }
  };
  encode_channel(leg_polygons, kSegLeg);
  encode_channel(foot_polygons, kSegFoot);
  return out;
}

OutputTensors encode_targets(std::span<const FootInstance> instances, const Skeleton& skeleton,
                             std::span<const Polygon> leg_polygons, std::span<const Polygon> foot_polygons,
                             const TargetConfig& cfg) {
  OutputTensors t;
  t.heatmap = encode_heatmaps(instances, cfg.sigma);
  t.pafmap = encode_pafs(instances, skeleton, cfg.paf_half_width).field;
  t.segmap = encode_segmentation(leg_polygons, foot_polygons);
  return t;
}

}  // namespace arshoe
