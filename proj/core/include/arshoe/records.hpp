#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arshoe/geom.hpp"
#include "arshoe/keypoints.hpp"
#include "arshoe/track.hpp"

namespace arshoe {

/// One line of a pose stream:
/// {"frame", "track", "qw", "qx", "qy", "qz", "tx", "ty", "tz", "flags"}.
/// "track" is optional on input (default 0).
struct PoseRecord {
  int frame = 0;
  int track = 0;
  Pose pose;
  std::vector<std::string> flags;

  friend bool operator==(const PoseRecord&, const PoseRecord&) = default;
};

nlohmann::json to_json(const PoseRecord& r);
PoseRecord pose_record_from_json(const nlohmann::json& j);

/// Pairs for the transition into `frame`: {"frame", "track", "prev": [[x,y],..], "cur": [[x,y],..]}.
struct PairsRecord {
  int frame = 0;
  int track = 0;
  MatchedPairs pairs;
};

nlohmann::json to_json(const PairsRecord& r);
PairsRecord pairs_record_from_json(const nlohmann::json& j);

// JSON Lines files; malformed lines throw Errc::format naming the line.
void write_pose_jsonl(std::ostream& out, const std::vector<PoseRecord>& records);
void write_pose_jsonl(const std::filesystem::path& path, const std::vector<PoseRecord>& records);
std::vector<PoseRecord> read_pose_jsonl(std::istream& in);
std::vector<PoseRecord> read_pose_jsonl(const std::filesystem::path& path);

void write_pairs_jsonl(const std::filesystem::path& path, const std::vector<PairsRecord>& records);
std::vector<PairsRecord> read_pairs_jsonl(const std::filesystem::path& path);

/// Grouped keypoints: {"space": "tensor"|"image", "stride": s, "instances":
/// [{"keypoints": [[x,y] | null] x 8, "confidences": [c | null] x 8}]}.
struct KeypointSet {
  bool tensor_space = true;
  double stride = 4.0;
  std::vector<FootInstance> instances;

  /// The instances scaled to image pixels.
  std::vector<FootInstance> image_instances() const;
};

nlohmann::json to_json(const KeypointSet& set);
KeypointSet keypoint_set_from_json(const nlohmann::json& j);

/// Parses a whole JSON file, mapping parse errors to Errc::format.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace arshoe
