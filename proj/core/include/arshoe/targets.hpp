#pragma once

#include <span>
#include <vector>

#include "arshoe/keypoints.hpp"
#include "arshoe/polygon.hpp"
#include "arshoe/tensor.hpp"

namespace arshoe {

inline constexpr int kTensorSize = 64;
inline constexpr int kHeatmapChannels = kNumKeypoints;
inline constexpr int kPafChannels = 2 * kNumEdges;
inline constexpr int kSegChannels = 2;
inline constexpr int kSegLeg = 0;
inline constexpr int kSegFoot = 1;

/// The three network heads: 8x64x64 heatmaps, 14x64x64 PAFs and 2x64x64
/// segmentation (channel 0 leg, channel 1 foot).
struct OutputTensors {
  Tensor heatmap{kHeatmapChannels, kTensorSize, kTensorSize};
  Tensor pafmap{kPafChannels, kTensorSize, kTensorSize};
  Tensor segmap{kSegChannels, kTensorSize, kTensorSize};
};

struct TargetConfig {
  double sigma = 2.0;           ///< heatmap Gaussian, tensor pixels
  double paf_half_width = 1.0;  ///< limb band half width, tensor pixels
};

/// Per-channel max over instances of exp(-d^2 / (2 sigma^2)); keypoints in
/// tensor coordinates.
Tensor encode_heatmaps(std::span<const FootInstance> instances, double sigma, int size = kTensorSize);

struct PafEncoding {
  Tensor field;
  /// (instance, edge) pairs skipped because the endpoints coincide.
  std::vector<std::pair<int, int>> degenerate_edges;
};

/// Unit limb direction on every pixel within half_width of the segment;
/// overlapping limbs of the same edge are averaged.
PafEncoding encode_pafs(std::span<const FootInstance> instances, const Skeleton& skeleton,
                        double half_width, int size = kTensorSize);

/// Pixel-center closed-set fill of each polygon. Throws
/// Errc::invalid_geometry for a polygon that is not simple.
Tensor encode_segmentation(std::span<const Polygon> leg_polygons, std::span<const Polygon> foot_polygons,
                           int size = kTensorSize);

OutputTensors encode_targets(std::span<const FootInstance> instances, const Skeleton& skeleton,
                             std::span<const Polygon> leg_polygons, std::span<const Polygon> foot_polygons,
                             const TargetConfig& cfg = {});

}  // namespace arshoe
