#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "arshoe/config.hpp"
#include "arshoe/pnp.hpp"
#include "arshoe/polygon.hpp"
#include "arshoe/raster.hpp"
#include "arshoe/targets.hpp"
#include "arshoe/track.hpp"

namespace arshoe {

/// Ground truth for one foot in one frame. Keypoints are image pixels.
struct FootTruth {
  Pose pose;
  std::array<Vec2, kNumKeypoints> keypoints{};
  std::array<Vec2, kNumKeypoints> noisy_keypoints{};
};

struct FrameRecord {
  int index = 0;
  double timestamp_s = 0.0;
  std::vector<FootTruth> feet;
  /// Stand-in for the network output; keypoint channels built from the
  /// noisy keypoints.
  OutputTensors tensors;
  /// Corner pairs from the previous frame, pooled over all feet (empty on
  /// frame 0). pair_labels[i] is the foot pair i was sampled from.
  MatchedPairs pairs;
  std::vector<int> pair_labels;
  BinaryMask leg_mask;
  std::vector<BinaryMask> shoe_masks;  ///< one per foot
  double sim_ms = 0.0;
};

/// Camera-from-model pose of `foot` at `frame`. The rest pose looks down on
/// the foot with the toe toward the top of the image, pitched by tilt_rad.
Pose trajectory_pose(const TrajectoryConfig& cfg, int foot, int frame);

/// Convex hull of the projected cloud and opening ring.
Polygon shoe_outline(const FootModel& model, const Pose& pose, const Intrinsics& k);
/// Projected opening ring.
Polygon opening_outline(const FootModel& model, const Pose& pose, const Intrinsics& k);
/// Outline fill minus the opening fill: a shoe render with one hole.
BinaryMask render_shoe_mask(const FootModel& model, const Pose& pose, const Intrinsics& k, int width, int height);
/// Image-plane strip of half width leg_radius (at the opening's depth)
/// running from the opening center along the projected leg axis to beyond
/// the image border.
Polygon leg_outline(const FootModel& model, const Pose& pose, const Intrinsics& k, double leg_radius, int width,
                    int height);

/// Deterministic under cfg.trajectory.seed. Throws Errc::config naming the
/// frame when any model point falls behind the camera.
std::vector<FrameRecord> simulate_sequence(const Config& cfg, const FootModel& model);

/// Run directory layout: config.json, truth.jsonl, pairs.jsonl and per
/// frame NNNNNN.tensors, NNNNNN_leg.pgm, NNNNNN_shoeK.pgm under frames/.
void save_run(const std::filesystem::path& dir, const Config& cfg, const std::vector<FrameRecord>& frames);

struct LoadedRun {
  Config config;
  std::vector<FrameRecord> frames;
};
/// Inverse of save_run. Truth keypoints are recomputed from the poses;
/// noisy keypoints and pair labels are not persisted.
LoadedRun load_run(const std::filesystem::path& dir, const FootModel& model);

}  // namespace arshoe
