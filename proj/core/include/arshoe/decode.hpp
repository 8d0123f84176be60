#pragma once

#include <array>
#include <span>
#include <vector>

#include "arshoe/keypoints.hpp"
#include "arshoe/tensor.hpp"

namespace arshoe {

struct PeakCandidate {
  int channel = 0;
  Vec2 position = Vec2::Zero();  ///< tensor coordinates, sub-pixel
  double score = 0.0;
};

struct DecodeConfig {
  double threshold = 0.3;
  double nms_radius = 3.0;
  int n_samples = 10;
  double min_score = 0.4;
};

/// Local maxima above `threshold` per heatmap channel, greedily suppressed
/// within `nms_radius` of a stronger peak and refined by a separable
/// quadratic fit over the 3x3 neighbourhood (in the log domain when all
/// samples are positive, which is exact for Gaussian peaks). Candidates are
/// ordered by channel, then by descending score.
std::vector<PeakCandidate> extract_peaks(const Tensor& heatmap, double threshold, double nms_radius);

/// Bilinear PAF sample for edge `edge` (channels 2e, 2e+1), clamped to the grid.
Vec2 sample_paf(const Tensor& pafmap, int edge, const Vec2& p);

/// Mean over `n_samples` equidistant points on a->b of <PAF, unit(a->b)>.
/// Throws Errc::undefined_direction when a and b coincide.
double connection_score(const Tensor& pafmap, int edge, const Vec2& a, const Vec2& b, int n_samples);

/// Candidate indices per keypoint slot (-1 when absent).
using CandidateGroup = std::array<int, kNumKeypoints>;

/// Greedy per-edge matching followed by conflict-free merging of accepted
/// connections in descending score order. Every candidate ends up in
/// exactly one group; groups are sorted by completeness, then mean score.
std::vector<CandidateGroup> group_candidates(std::span<const PeakCandidate> candidates, const Tensor& pafmap,
                                             const Skeleton& skeleton, double min_score, int n_samples = 10);

/// group_candidates resolved to keypoint positions (tensor coordinates).
std::vector<FootInstance> group_keypoints(std::span<const PeakCandidate> candidates, const Tensor& pafmap,
                                          const Skeleton& skeleton, double min_score, int n_samples = 10);

/// extract_peaks + group_keypoints with one config.
std::vector<FootInstance> decode_instances(const Tensor& heatmap, const Tensor& pafmap, const Skeleton& skeleton,
                                           const DecodeConfig& cfg = {});

}  // namespace arshoe
