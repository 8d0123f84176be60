#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arshoe/config.hpp"
#include "arshoe/simulate.hpp"

namespace arshoe {

struct PipelineOptions {
  DecodeConfig decode;
  LmOptions pnp;
  StabilizerConfig stabilizer;
  Intrinsics intrinsics;
  int image_width = 256;
  int image_height = 256;
  double stride = 4.0;
  bool stabilize = true;
  bool occlusion = true;
  bool keep_masks = false;

  static PipelineOptions from_config(const Config& cfg);
};

/// Wall-clock milliseconds. `network` is the simulator's frame synthesis
/// time, standing in for the absent network forward pass.
struct StageTimings {
  double network = 0.0;
  double decode = 0.0;
  double pnp = 0.0;
  double stabilize = 0.0;
  double occlusion = 0.0;

  /// Decode, grouping, PnP and stabilization.
  double pose() const { return decode + pnp + stabilize; }
  /// Everything after the network.
  double pipeline() const { return decode + pnp + stabilize + occlusion; }

  friend bool operator==(const StageTimings&, const StageTimings&) = default;
};

struct TrackFrame {
  int track = 0;
  int truth_foot = -1;  ///< simulator foot this instance matched best
  bool measured_ok = false;
  Pose measured;
  Pose refined;
  double residual_px = 0.0;
  double divergence = 0.0;
  double w_r = 1.0;
  double w_t = 1.0;
  bool pass_through = true;
  PoseError error;  ///< refined pose against truth
  PoseError raw_error;
  std::size_t occluded_pixels = 0;
  std::string mask_ref;
  BinaryMask mask;  ///< only with keep_masks
  std::vector<std::string> flags;
};

struct FrameReport {
  int index = 0;
  std::vector<TrackFrame> tracks;
  std::vector<std::string> errors;
  StageTimings timings;
};

struct Aggregates {
  int frames = 0;
  int tracks = 0;
  int failures = 0;
  int identity_swaps = 0;
  double mean_euler_deg = 0.0;
  double mean_translation_cm = 0.0;
  double raw_mean_euler_deg = 0.0;
  double raw_mean_translation_cm = 0.0;
  double jitter_raw = 0.0;
  double jitter_refined = 0.0;
  StageTimings mean_ms;
  double pipeline_fps = 0.0;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

struct RunReport {
  std::vector<FrameReport> frames;
  Aggregates aggregates;
};

/// decode -> group -> PnP -> stabilize -> occlusion per frame. Instances
/// are associated with tracks by nearest centroid; failures are recorded
/// per frame and the run continues.
RunReport run_pipeline(const std::vector<FrameRecord>& frames, const FootModel& model, const PipelineOptions& options);

/// Aggregates from the per-frame records alone.
Aggregates compute_aggregates(const std::vector<FrameReport>& frames, const FootModel& model, const Intrinsics& k);

/// Refined poses of one track, in frame order, over frames where PnP succeeded.
std::vector<Pose> track_poses(const std::vector<FrameReport>& frames, int track, bool refined);

nlohmann::json to_json(const RunReport& report);

}  // namespace arshoe
