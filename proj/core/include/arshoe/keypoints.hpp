#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "arshoe/geom.hpp"

namespace arshoe {

/// Foot keypoint layout: 1 toe, 0 and 2 heel, 3-6 sides, 7 instep.
inline constexpr int kNumKeypoints = 8;
inline constexpr int kNumEdges = 7;

/// One foot's grouped keypoints. Coordinates are in tensor or image space;
/// the producer states which.
struct FootInstance {
  std::array<std::optional<Vec2>, kNumKeypoints> keypoints{};
  std::array<std::optional<double>, kNumKeypoints> confidences{};

  int completeness() const;
  bool complete() const { return completeness() == kNumKeypoints; }
  double mean_confidence() const;
  Vec2 centroid() const;

  static FootInstance from_points(const std::array<Vec2, kNumKeypoints>& pts);
};

/// Keypoint connections, one PAF channel pair per edge: edge e uses
/// channels 2e (x) and 2e+1 (y).
struct Skeleton {
  std::vector<std::pair<int, int>> edges;

  /// Toe-to-heel chains down each side plus the instep:
  /// (1,3) (1,4) (3,5) (4,6) (5,0) (6,2) (7,1).
  static Skeleton foot();

  /// Throws Errc::config unless there are 7 edges over indices 0..7 that
  /// form a connected graph.
  void validate() const;
};

}  // namespace arshoe
