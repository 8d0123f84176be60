#include "arshoe/records.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace arshoe {

using nlohmann::json;

namespace {

template <typename F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::format, what + ": " + e.what());
  }
}

json points_to_json(const std::vector<Vec2>& pts) {
  json a = json::array();
  for (const Vec2& p : pts) a.push_back({p.x(), p.y()});
  return a;
}

std::vector<Vec2> points_from_json(const json& a) {
  std::vector<Vec2> pts;
  for (const json& p : a) {
    if (!p.is_array() || p.size() != 2) throw Error(Errc::format, "point must be [x, y]");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return pts;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::format, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::format, "cannot open " + path.string());
  return in;
}

// Calls f(json, line_number) for every nonblank line.
template <typename F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(n);
    guarded(where, [&] {
      try {
        f(json::parse(line));
      } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
      }
      return 0;
    });
  }
}

}  // namespace

json to_json(const PoseRecord& r) {
  const Quat& q = r.pose.rotation();
  const Vec3& t = r.pose.translation();
  return {{"frame", r.frame}, {"track", r.track}, {"qw", q.w}, {"qx", q.x}, {"qy", q.y}, {"qz", q.z},
          {"tx", t.x()},      {"ty", t.y()},      {"tz", t.z()}, {"flags", r.flags}};
}

PoseRecord pose_record_from_json(const json& j) {
  return guarded("pose record", [&] {
    PoseRecord r;
    r.frame = j.at("frame").get<int>();
    r.track = j.value("track", 0);
    const Quat q{j.at("qw").get<double>(), j.at("qx").get<double>(), j.at("qy").get<double>(),
                 j.at("qz").get<double>()};
    if (!(q.norm() > 0.0)) throw Error(Errc::format, "zero quaternion");
    r.pose = Pose(q, Vec3(j.at("tx").get<double>(), j.at("ty").get<double>(), j.at("tz").get<double>()));
    if (j.contains("flags")) r.flags = j.at("flags").get<std::vector<std::string>>();
    return r;
  });
}

json to_json(const PairsRecord& r) {
  return {{"frame", r.frame}, {"track", r.track}, {"prev", points_to_json(r.pairs.prev)},
          {"cur", points_to_json(r.pairs.cur)}};
}

PairsRecord pairs_record_from_json(const json& j) {
  return guarded("pairs record", [&] {
    PairsRecord r;
    r.frame = j.at("frame").get<int>();
    r.track = j.value("track", 0);
    r.pairs.prev = points_from_json(j.at("prev"));
    r.pairs.cur = points_from_json(j.at("cur"));
    if (r.pairs.prev.size() != r.pairs.cur.size()) throw Error(Errc::format, "prev and cur differ in length");
    return r;
  });
}

void write_pose_jsonl(std::ostream& out, const std::vector<PoseRecord>& records) {
  for (const PoseRecord& r : records) out << to_json(r).dump() << '\n';
}

void write_pose_jsonl(const std::filesystem::path& path, const std::vector<PoseRecord>& records) {
  auto out = open_out(path);
  write_pose_jsonl(out, records);
}

std::vector<PoseRecord> read_pose_jsonl(std::istream& in) {
  std::vector<PoseRecord> records;
  for_each_line(in, [&](const json& j) { records.push_back(pose_record_from_json(j)); });
  return records;
}

std::vector<PoseRecord> read_pose_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pose_jsonl(in);
}

void write_pairs_jsonl(const std::filesystem::path& path, const std::vector<PairsRecord>& records) {
  auto out = open_out(path);
  for (const PairsRecord& r : records) out << to_json(r).dump() << '\n';
}

std::vector<PairsRecord> read_pairs_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<PairsRecord> records;
  for_each_line(in, [&](const json& j) { records.push_back(pairs_record_from_json(j)); });
  return records;
}

std::vector<FootInstance> KeypointSet::image_instances() const {
  if (!tensor_space) return instances;
  std::vector<FootInstance> out = instances;
  for (FootInstance& f : out) {
    for (auto& kp : f.keypoints) {
      if (kp) *kp *= stride;
    }
  }
  return out;
}

json to_json(const KeypointSet& set) {
  json inst = json::array();
  for (const FootInstance& f : set.instances) {
    json kps = json::array(), conf = json::array();
    for (int i = 0; i < kNumKeypoints; ++i) {
      const auto& kp = f.keypoints[static_cast<std::size_t>(i)];
      const auto& c = f.confidences[static_cast<std::size_t>(i)];
      kps.push_back(kp ? json{kp->x(), kp->y()} : json(nullptr));
      conf.push_back(c ? json(*c) : json(nullptr));
    }
    inst.push_back({{"keypoints", kps}, {"confidences", conf}});
  }
  return {{"space", set.tensor_space ? "tensor" : "image"}, {"stride", set.stride}, {"instances", inst}};
}

KeypointSet keypoint_set_from_json(const json& j) {
  return guarded("keypoints", [&] {
    KeypointSet set;
    const std::string space = j.value("space", "image");
    if (space != "tensor" && space != "image") throw Error(Errc::format, "space must be 'tensor' or 'image'");
    set.tensor_space = space == "tensor";
    set.stride = j.value("stride", 4.0);
    for (const json& inst : j.at("instances")) {
      FootInstance f;
      const json& kps = inst.at("keypoints");
      if (!kps.is_array() || kps.size() != kNumKeypoints) throw Error(Errc::format, "expected 8 keypoints");
      for (std::size_t i = 0; i < kNumKeypoints; ++i) {
        if (kps[i].is_null()) continue;
        if (!kps[i].is_array() || kps[i].size() != 2) throw Error(Errc::format, "keypoint must be [x, y] or null");
        f.keypoints[i] = Vec2(kps[i][0].get<double>(), kps[i][1].get<double>());
      }
      if (inst.contains("confidences")) {
        const json& conf = inst.at("confidences");
        for (std::size_t i = 0; i < kNumKeypoints && i < conf.size(); ++i) {
          if (!conf[i].is_null()) f.confidences[i] = conf[i].get<double>();
        }
      }
      set.instances.push_back(f);
    }
    return set;
  });
}

json read_json_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return guarded(path.string(), [&] { return json::parse(in); });
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace arshoe
