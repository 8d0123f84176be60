#pragma once

#include <vector>

#include "arshoe/geom.hpp"
#include "arshoe/raster.hpp"

namespace arshoe {

/// Corner correspondences between consecutive frames; prev[i] <-> cur[i].
struct MatchedPairs {
  std::vector<Vec2> prev;
  std::vector<Vec2> cur;

  std::size_t size() const { return prev.size(); }
  bool empty() const { return prev.empty(); }
};

struct TrackerConfig {
  int fast_threshold = 20;
  int max_corners = 200;
  int window = 11;
  int pyramid_levels = 3;
  int iterations = 20;
  double fb_tolerance = 1.0;
};

/// FAST-9 score at (x, y): the sum of |I_p - I_c| over the longest
/// contiguous arc of >= 9 circle pixels all brighter (or all darker) than
/// the center by more than `threshold`; 0 when there is no such arc.
/// The pixel must be at least 3 px from every border.
int fast9_score(const FrameImage& image, int x, int y, int threshold);

/// FAST-9 corners inside `mask` (>= 3 px border margin), 3x3 non-max
/// suppressed on the score, strongest first, at most `max_corners`.
std::vector<Vec2> detect_fast(const FrameImage& image, const BinaryMask& mask, int threshold, int max_corners);

/// Pyramidal Lucas-Kanade forward, then backward from the tracked point;
/// a pair survives when the backward track lands within `fb_tolerance` of
/// the corner. Output keeps the input order of surviving corners.
MatchedPairs match_corners(const FrameImage& prev, const FrameImage& cur, const std::vector<Vec2>& corners,
                           int window, double fb_tolerance, int pyramid_levels = 3, int iterations = 20);

/// detect_fast on `prev` within `foot_mask`, then match_corners.
MatchedPairs track_pairs(const FrameImage& prev, const FrameImage& cur, const BinaryMask& foot_mask,
                         const TrackerConfig& cfg = {});

}  // namespace arshoe
