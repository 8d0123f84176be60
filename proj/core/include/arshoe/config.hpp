#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "arshoe/decode.hpp"
#include "arshoe/pnp.hpp"
#include "arshoe/stabilize.hpp"
#include "arshoe/targets.hpp"

namespace arshoe {

enum class MotionProfile { static_pose, sinusoid, walk };

struct TrajectoryConfig {
  int frames = 300;
  MotionProfile profile = MotionProfile::static_pose;
  double amplitude_m = 0.02;     ///< translation amplitude, meters
  double amplitude_rad = 0.10;   ///< rotation amplitude, radians
  int period_frames = 60;
  double keypoint_sigma = 2.0;   ///< image pixels
  double pair_sigma = 0.3;       ///< image pixels
  int pairs_per_frame = 40;
  std::uint64_t seed = 1;
  Intrinsics intrinsics;
  int image_width = 256;
  int image_height = 256;
  int tensor_size = kTensorSize;
  bool two_feet = false;
  double depth = 0.55;           ///< base distance to the feet, meters
  double tilt_rad = 0.35;        ///< camera pitch relative to a top-down view
  double foot_gap = 0.16;        ///< lateral distance between feet, meters
  double leg_radius = 0.018;     ///< meters

  double stride() const { return static_cast<double>(image_width) / tensor_size; }
  /// Throws Errc::config on invalid values.
  void validate() const;
};

/// Everything the simulator and pipeline can be configured with. JSON
/// sections: trajectory, camera, targets, decode, pnp, stabilizer.
struct Config {
  TrajectoryConfig trajectory;
  TargetConfig targets;
  DecodeConfig decode;
  LmOptions pnp;
  StabilizerConfig stabilizer;
};

nlohmann::json to_json(const Config& cfg);
/// Missing keys keep their defaults; unknown or mistyped keys throw
/// Errc::config.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);

std::string to_string(MotionProfile p);
MotionProfile motion_profile_from_string(const std::string& s);

}  // namespace arshoe
