#include "arshoe/config.hpp"

#include <fstream>
#include <set>

namespace arshoe {

namespace {

using nlohmann::json;

// Reads `key` from `obj` into `out` when present, rejecting type mismatches.
template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("key '") + key + "': " + e.what());
  }
}

void check_keys(const json& obj, const char* section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw Error(Errc::config, std::string("section '") + section + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    if (!ok.count(k)) throw Error(Errc::config, std::string("unknown key '") + k + "' in section '" + section + "'");
  }
}

}  // namespace

void TrajectoryConfig::validate() const {
  if (frames < 1) throw Error(Errc::config, "trajectory.frames must be >= 1");
  if (keypoint_sigma < 0 || pair_sigma < 0) throw Error(Errc::config, "noise sigmas must be >= 0");
  if (period_frames < 1) throw Error(Errc::config, "trajectory.period_frames must be >= 1");
  if (pairs_per_frame < 0) throw Error(Errc::config, "trajectory.pairs_per_frame must be >= 0");
  if (image_width < 16 || image_height < 16 || tensor_size < 8) throw Error(Errc::config, "image sizes too small");
  if (image_width % tensor_size != 0) throw Error(Errc::config, "image_width must be a multiple of tensor_size");
  if (!(depth > 0)) throw Error(Errc::config, "trajectory.depth must be positive");
  try {
    intrinsics.validate();
  } catch (const Error& e) {
    throw Error(Errc::config, e.what());
  }
}

std::string to_string(MotionProfile p) {
  switch (p) {
    case MotionProfile::static_pose: return "static";
    case MotionProfile::sinusoid: return "sinusoid";
    case MotionProfile::walk: return "walk";
  }
  return "static";
}

MotionProfile motion_profile_from_string(const std::string& s) {
  if (s == "static") return MotionProfile::static_pose;
  if (s == "sinusoid") return MotionProfile::sinusoid;
  if (s == "walk") return MotionProfile::walk;
  throw Error(Errc::config, "unknown motion profile '" + s + "'");
}

json to_json(const Config& c) {
  const TrajectoryConfig& t = c.trajectory;
  json j;
  j["trajectory"] = {{"frames", t.frames},
                     {"profile", to_string(t.profile)},
                     {"amplitude_m", t.amplitude_m},
                     {"amplitude_rad", t.amplitude_rad},
                     {"period_frames", t.period_frames},
                     {"keypoint_sigma", t.keypoint_sigma},
                     {"pair_sigma", t.pair_sigma},
                     {"pairs_per_frame", t.pairs_per_frame},
                     {"seed", t.seed},
                     {"two_feet", t.two_feet},
                     {"depth", t.depth},
                     {"tilt_rad", t.tilt_rad},
                     {"foot_gap", t.foot_gap},
                     {"leg_radius", t.leg_radius}};
  j["camera"] = {{"fx", t.intrinsics.fx},
                 {"fy", t.intrinsics.fy},
                 {"cx", t.intrinsics.cx},
                 {"cy", t.intrinsics.cy},
                 {"image_width", t.image_width},
                 {"image_height", t.image_height},
                 {"tensor_size", t.tensor_size}};
  j["targets"] = {{"sigma", c.targets.sigma}, {"paf_half_width", c.targets.paf_half_width}};
  j["decode"] = {{"threshold", c.decode.threshold},
                 {"nms_radius", c.decode.nms_radius},
                 {"n_samples", c.decode.n_samples},
                 {"min_score", c.decode.min_score}};
  j["pnp"] = {{"max_iterations", c.pnp.max_iterations},
              {"gradient_tolerance", c.pnp.gradient_tolerance},
              {"damping_init", c.pnp.initial_damping},
              {"damping_factor", c.pnp.damping_factor}};
  j["stabilizer"] = {
      {"alpha", c.stabilizer.alpha},
      {"beta", c.stabilizer.beta},
      {"d_floor", c.stabilizer.d_floor},
      {"clamp", c.stabilizer.weight_clamp},
      {"prev_pose_source", c.stabilizer.prev_pose_source == PrevPoseSource::refined ? "refined" : "raw"},
      {"translation_prediction",
       c.stabilizer.translation_prediction == TranslationPrediction::propagate_prev ? "propagate_prev" : "literal_eq5"}};
  return j;
}

Config config_from_json(const json& j) {
  Config c;
  if (!j.is_object()) throw Error(Errc::config, "config root must be an object");
  check_keys(j, "root", {"trajectory", "camera", "targets", "decode", "pnp", "stabilizer"});

  if (j.contains("trajectory")) {
    const json& s = j["trajectory"];
    check_keys(s, "trajectory",
               {"frames", "profile", "amplitude_m", "amplitude_rad", "period_frames", "keypoint_sigma", "pair_sigma",
                "pairs_per_frame", "seed", "two_feet", "depth", "tilt_rad", "foot_gap", "leg_radius"});
    TrajectoryConfig& t = c.trajectory;
    read(s, "frames", t.frames);
    std::string profile = to_string(t.profile);
    read(s, "profile", profile);
    t.profile = motion_profile_from_string(profile);
    read(s, "amplitude_m", t.amplitude_m);
    read(s, "amplitude_rad", t.amplitude_rad);
    read(s, "period_frames", t.period_frames);
    read(s, "keypoint_sigma", t.keypoint_sigma);
    read(s, "pair_sigma", t.pair_sigma);
    read(s, "pairs_per_frame", t.pairs_per_frame);
    read(s, "seed", t.seed);
    read(s, "two_feet", t.two_feet);
    read(s, "depth", t.depth);
    read(s, "tilt_rad", t.tilt_rad);
    read(s, "foot_gap", t.foot_gap);
    read(s, "leg_radius", t.leg_radius);
  }
  if (j.contains("camera")) {
    const json& s = j["camera"];
    check_keys(s, "camera", {"fx", "fy", "cx", "cy", "image_width", "image_height", "tensor_size"});
    TrajectoryConfig& t = c.trajectory;
    read(s, "fx", t.intrinsics.fx);
    read(s, "fy", t.intrinsics.fy);
    read(s, "cx", t.intrinsics.cx);
    read(s, "cy", t.intrinsics.cy);
    read(s, "image_width", t.image_width);
    read(s, "image_height", t.image_height);
    read(s, "tensor_size", t.tensor_size);
  }
  if (j.contains("targets")) {
    const json& s = j["targets"];
    check_keys(s, "targets", {"sigma", "paf_half_width"});
    read(s, "sigma", c.targets.sigma);
    read(s, "paf_half_width", c.targets.paf_half_width);
  }
  if (j.contains("decode")) {
    const json& s = j["decode"];
    check_keys(s, "decode", {"threshold", "nms_radius", "n_samples", "min_score"});
    read(s, "threshold", c.decode.threshold);
    read(s, "nms_radius", c.decode.nms_radius);
    read(s, "n_samples", c.decode.n_samples);
    read(s, "min_score", c.decode.min_score);
  }
  if (j.contains("pnp")) {
    const json& s = j["pnp"];
    check_keys(s, "pnp", {"max_iterations", "gradient_tolerance", "damping_init", "damping_factor"});
    read(s, "max_iterations", c.pnp.max_iterations);
    read(s, "gradient_tolerance", c.pnp.gradient_tolerance);
    read(s, "damping_init", c.pnp.initial_damping);
    read(s, "damping_factor", c.pnp.damping_factor);
  }
  if (j.contains("stabilizer")) {
    const json& s = j["stabilizer"];
    check_keys(s, "stabilizer", {"alpha", "beta", "d_floor", "clamp", "prev_pose_source", "translation_prediction"});
    read(s, "alpha", c.stabilizer.alpha);
    read(s, "beta", c.stabilizer.beta);
    read(s, "d_floor", c.stabilizer.d_floor);
    read(s, "clamp", c.stabilizer.weight_clamp);
    std::string src = "refined", pred = "propagate_prev";
    read(s, "prev_pose_source", src);
    read(s, "translation_prediction", pred);
    if (src != "refined" && src != "raw") throw Error(Errc::config, "prev_pose_source must be 'refined' or 'raw'");
    if (pred != "propagate_prev" && pred != "literal_eq5") {
      throw Error(Errc::config, "translation_prediction must be 'propagate_prev' or 'literal_eq5'");
    }
    c.stabilizer.prev_pose_source = src == "refined" ? PrevPoseSource::refined : PrevPoseSource::raw;
    c.stabilizer.translation_prediction =
        pred == "propagate_prev" ? TranslationPrediction::propagate_prev : TranslationPrediction::literal_eq5;
  }
  c.trajectory.validate();
  c.stabilizer.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::config, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace arshoe
