#include "arshoe/simulate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Geometry>

#include "arshoe/records.hpp"
#include "arshoe/rng.hpp"
#include "arshoe/tensor_io.hpp"

namespace arshoe {

namespace {

Mat3 rot_x(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix();
}
Mat3 rot_y(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix();
}
Mat3 rot_z(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
}

// Toe to image up, foot's left to image left, sole facing away.
Mat3 rest_rotation() {
  Mat3 r;
  r << 0, -1, 0, -1, 0, 0, 0, 0, -1;
  return r;
}

Vec3 opening_center(const FootModel& model) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : model.opening) c += p;
  return c / static_cast<double>(model.opening.size());
}

std::string frame_stem(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", index);
  return buf;
}

Polygon scaled(const Polygon& poly, double s) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& p : poly) out.push_back(p * s);
  return out;
}

}  // namespace

Pose trajectory_pose(const TrajectoryConfig& cfg, int foot, int frame) {
  const Mat3 r0 = rot_x(cfg.tilt_rad) * rest_rotation();
  const double side = cfg.two_feet ? (foot == 0 ? 0.5 : -0.5) : 0.0;
  const Vec3 t0 = Vec3(0, 0, cfg.depth) + r0 * Vec3(0, side * cfg.foot_gap, 0);
  const double phase = 2.0 * std::numbers::pi * frame / cfg.period_frames;

  switch (cfg.profile) {
    case MotionProfile::static_pose:
      return Pose(r0, t0);
    case MotionProfile::sinusoid: {
      const double s = std::sin(phase);
      return Pose(Mat3(rot_z(cfg.amplitude_rad * s) * r0), Vec3(t0 + Vec3(0, 0, cfg.amplitude_m * s)));
    }
    case MotionProfile::walk: {
      // Feet alternate: each swings forward along its toe axis, lifting and
      // pitching while in the air.
      const double s = std::sin(phase + (foot == 1 ? std::numbers::pi : 0.0));
      const double lift = std::max(0.0, s);
      const Mat3 r = r0 * rot_y(-cfg.amplitude_rad * lift);
      const Vec3 t = t0 + r0 * Vec3(cfg.amplitude_m * s, 0, 0.5 * cfg.amplitude_m * lift);
      return Pose(r, t);
    }
  }
  return Pose(r0, t0);
}

Polygon shoe_outline(const FootModel& model, const Pose& pose, const Intrinsics& k) {
  std::vector<Vec2> pts;
  pts.reserve(model.cloud.points.size() + model.opening.size());
  for (const Vec3& p : model.cloud.points) pts.push_back(project_point(pose.apply(p), k));
  for (const Vec3& p : model.opening) pts.push_back(project_point(pose.apply(p), k));
  return convex_hull(std::move(pts));
}

Polygon opening_outline(const FootModel& model, const Pose& pose, const Intrinsics& k) {
  Polygon ring;
  for (const Vec3& p : model.opening) ring.push_back(project_point(pose.apply(p), k));
  return ring;
}

BinaryMask render_shoe_mask(const FootModel& model, const Pose& pose, const Intrinsics& k, int width, int height) {
  BinaryMask mask = rasterize_polygon(shoe_outline(model, pose, k), width, height);
  if (model.opening.size() >= 3) {
    const BinaryMask hole = rasterize_polygon(opening_outline(model, pose, k), width, height);
    for (std::size_t i = 0; i < mask.bits().size(); ++i) {
      if (hole.bits()[i]) mask.bits()[i] = 0;
    }
  }
  return mask;
}

Polygon leg_outline(const FootModel& model, const Pose& pose, const Intrinsics& k, double leg_radius, int width,
                    int height) {
  if (model.opening.empty()) throw Error(Errc::missing_opening, "foot model has no opening ring");
  const Vec3 c3 = pose.apply(opening_center(model));
  const Vec2 c = project_point(c3, k);
  Vec2 dir = project_point(pose.apply(opening_center(model) + Vec3(0, 0, 0.05)), k) - c;
  if (dir.norm() < 1e-6) {
    // Leg seen end-on: let it trail toward the heel.
    const Vec3 heel = 0.5 * (model.keypoints3d[0] + model.keypoints3d[2]);
    dir = project_point(pose.apply(heel), k) - c;
  }
  dir.normalize();
  const Vec2 n(-dir.y(), dir.x());
  const double half = leg_radius * k.fx / c3.z();
  const Vec2 end = c + dir * 2.0 * (width + height);
  return {c + n * half, end + n * half, end - n * half, c - n * half};
}

std::vector<FrameRecord> simulate_sequence(const Config& cfg, const FootModel& model) {
  const TrajectoryConfig& tc = cfg.trajectory;
  tc.validate();
  model.validate();
  const Intrinsics& k = tc.intrinsics;
  const int n_feet = tc.two_feet ? 2 : 1;
  const double inv_stride = 1.0 / tc.stride();
  const Skeleton skeleton = Skeleton::foot();
  Rng rng(tc.seed);

  std::vector<FrameRecord> frames;
  frames.reserve(static_cast<std::size_t>(tc.frames));
  for (int f = 0; f < tc.frames; ++f) {
    const auto t0 = std::chrono::steady_clock::now();
    FrameRecord rec;
    rec.index = f;
    rec.timestamp_s = f / 30.0;

    std::vector<FootInstance> instances;
    std::vector<Polygon> legs, feet;
    rec.leg_mask = BinaryMask(tc.image_width, tc.image_height);
    for (int i = 0; i < n_feet; ++i) {
      FootTruth truth;
      truth.pose = trajectory_pose(tc, i, f);
      try {
        for (const Vec3& p : model.cloud.points) project_point(truth.pose.apply(p), k);
        for (const Vec3& p : model.opening) project_point(truth.pose.apply(p), k);
      } catch (const Error&) {
        throw Error(Errc::config, "frame " + std::to_string(f) + ": foot model behind the camera");
      }
      truth.keypoints = project_model_keypoints(model, truth.pose, k);
      std::array<Vec2, kNumKeypoints> tensor_kp;
      for (int j = 0; j < kNumKeypoints; ++j) {
        const Vec2 noise(rng.normal(0.0, tc.keypoint_sigma), rng.normal(0.0, tc.keypoint_sigma));
        truth.noisy_keypoints[static_cast<std::size_t>(j)] = truth.keypoints[static_cast<std::size_t>(j)] + noise;
        tensor_kp[static_cast<std::size_t>(j)] = truth.noisy_keypoints[static_cast<std::size_t>(j)] * inv_stride;
      }
      instances.push_back(FootInstance::from_points(tensor_kp));

      const Polygon outline = shoe_outline(model, truth.pose, k);
      const Polygon leg = leg_outline(model, truth.pose, k, tc.leg_radius, tc.image_width, tc.image_height);
      feet.push_back(scaled(outline, inv_stride));
      legs.push_back(scaled(leg, inv_stride));
      fill_polygon(leg, rec.leg_mask);
      rec.shoe_masks.push_back(render_shoe_mask(model, truth.pose, k, tc.image_width, tc.image_height));
      rec.feet.push_back(truth);
    }
    rec.tensors = encode_targets(instances, skeleton, legs, feet, cfg.targets);

    if (f > 0) {
      const FrameRecord& prev = frames.back();
      for (int i = 0; i < n_feet; ++i) {
        for (int p = 0; p < tc.pairs_per_frame; ++p) {
          const Vec3& x = model.cloud.points[rng.below(model.cloud.points.size())];
          const Vec2 a = project_point(prev.feet[static_cast<std::size_t>(i)].pose.apply(x), k);
          const Vec2 b = project_point(rec.feet[static_cast<std::size_t>(i)].pose.apply(x), k);
          const Vec2 na(rng.normal(0.0, tc.pair_sigma), rng.normal(0.0, tc.pair_sigma));
          const Vec2 nb(rng.normal(0.0, tc.pair_sigma), rng.normal(0.0, tc.pair_sigma));
          rec.pairs.prev.push_back(a + na);
          rec.pairs.cur.push_back(b + nb);
          rec.pair_labels.push_back(i);
        }
      }
    }
    rec.sim_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    frames.push_back(std::move(rec));
  }
  return frames;
}

void save_run(const std::filesystem::path& dir, const Config& cfg, const std::vector<FrameRecord>& frames) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "frames");
  write_json_file(dir / "config.json", to_json(cfg));
  std::vector<PoseRecord> truth;
  std::vector<PairsRecord> pairs;
  for (const FrameRecord& rec : frames) {
    for (std::size_t i = 0; i < rec.feet.size(); ++i) {
      truth.push_back({rec.index, static_cast<int>(i), rec.feet[i].pose, {}});
    }
    if (!rec.pairs.empty()) pairs.push_back({rec.index, 0, rec.pairs});
    const std::string stem = frame_stem(rec.index);
    write_tensors(dir / "frames" / (stem + ".tensors"),
                  std::vector<Tensor>{rec.tensors.heatmap, rec.tensors.pafmap, rec.tensors.segmap});
    write_mask_pgm(dir / "frames" / (stem + "_leg.pgm"), rec.leg_mask);
    for (std::size_t i = 0; i < rec.shoe_masks.size(); ++i) {
      write_mask_pgm(dir / "frames" / (stem + "_shoe" + std::to_string(i) + ".pgm"), rec.shoe_masks[i]);
    }
  }
  write_pose_jsonl(dir / "truth.jsonl", truth);
  write_pairs_jsonl(dir / "pairs.jsonl", pairs);
}

LoadedRun load_run(const std::filesystem::path& dir, const FootModel& model) {
  LoadedRun run;
  run.config = config_from_json(read_json_file(dir / "config.json"));
  const TrajectoryConfig& tc = run.config.trajectory;
  const auto truth = read_pose_jsonl(dir / "truth.jsonl");
  const auto pairs = read_pairs_jsonl(dir / "pairs.jsonl");

  run.frames.resize(static_cast<std::size_t>(tc.frames));
  for (int f = 0; f < tc.frames; ++f) {
    FrameRecord& rec = run.frames[static_cast<std::size_t>(f)];
    rec.index = f;
    rec.timestamp_s = f / 30.0;
    const std::string stem = frame_stem(f);
    const auto tensors = read_tensors(dir / "frames" / (stem + ".tensors"));
    if (tensors.size() != 3) throw Error(Errc::format, stem + ".tensors: expected 3 tensors");
    rec.tensors = {tensors[0], tensors[1], tensors[2]};
    rec.leg_mask = read_mask_pgm(dir / "frames" / (stem + "_leg.pgm"));
  }
  for (const PoseRecord& r : truth) {
    if (r.frame < 0 || r.frame >= tc.frames) throw Error(Errc::format, "truth.jsonl: frame out of range");
    FrameRecord& rec = run.frames[static_cast<std::size_t>(r.frame)];
    if (r.track != static_cast<int>(rec.feet.size())) throw Error(Errc::format, "truth.jsonl: tracks out of order");
    FootTruth ft;
    ft.pose = r.pose;
    ft.keypoints = project_model_keypoints(model, r.pose, tc.intrinsics);
    ft.noisy_keypoints = ft.keypoints;
    rec.feet.push_back(ft);
    rec.shoe_masks.push_back(
        read_mask_pgm(dir / "frames" / (frame_stem(r.frame) + "_shoe" + std::to_string(r.track) + ".pgm")));
  }
  for (const PairsRecord& p : pairs) {
    if (p.frame < 0 || p.frame >= tc.frames) throw Error(Errc::format, "pairs.jsonl: frame out of range");
    run.frames[static_cast<std::size_t>(p.frame)].pairs = p.pairs;
  }
  return run;
}

}  // namespace arshoe
