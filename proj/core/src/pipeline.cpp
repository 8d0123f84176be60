#include "arshoe/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>

#include "arshoe/decode.hpp"
#include "arshoe/metrics.hpp"
#include "arshoe/occlude.hpp"
#include "arshoe/records.hpp"

namespace arshoe {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct TrackState {
  Vec2 centroid = Vec2::Zero();
  int last_frame = -1;
  Stabilizer stabilizer;
};

// Mean distance over keypoints present in `inst` to the same slots of `kp`.
double instance_distance(const FootInstance& inst, const std::array<Vec2, kNumKeypoints>& kp) {
  double sum = 0.0;
  int n = 0;
  for (int j = 0; j < kNumKeypoints; ++j) {
    if (const auto& p = inst.keypoints[static_cast<std::size_t>(j)]) {
      sum += (*p - kp[static_cast<std::size_t>(j)]).norm();
      ++n;
    }
  }
  return n ? sum / n : std::numeric_limits<double>::infinity();
}

}  // namespace

PipelineOptions PipelineOptions::from_config(const Config& cfg) {
  PipelineOptions o;
  o.decode = cfg.decode;
  o.pnp = cfg.pnp;
  o.stabilizer = cfg.stabilizer;
  o.intrinsics = cfg.trajectory.intrinsics;
  o.image_width = cfg.trajectory.image_width;
  o.image_height = cfg.trajectory.image_height;
  o.stride = cfg.trajectory.stride();
  return o;
}

RunReport run_pipeline(const std::vector<FrameRecord>& frames, const FootModel& model, const PipelineOptions& opt) {
  if (frames.empty()) throw Error(Errc::invalid_argument, "run_pipeline needs at least one frame");
  opt.stabilizer.validate();
  const Intrinsics& k = opt.intrinsics;
  const Skeleton skeleton = Skeleton::foot();

  RunReport report;
  std::vector<TrackState> tracks;

  for (const FrameRecord& rec : frames) {
    FrameReport fr;
    fr.index = rec.index;
    fr.timings.network = rec.sim_ms;

    // Decode and group.
    auto t0 = Clock::now();
    std::vector<FootInstance> instances;
    try {
      KeypointSet set{true, opt.stride, decode_instances(rec.tensors.heatmap, rec.tensors.pafmap, skeleton, opt.decode)};
      for (FootInstance& inst : set.image_instances()) {
        if (inst.completeness() >= 6) instances.push_back(inst);
      }
    } catch (const Error& e) {
      fr.errors.push_back(std::string("decode: ") + e.what());
    }
    fr.timings.decode = ms_since(t0);

    // Associate instances with tracks: closest (instance, track) pairs
    // first, new tracks left to right.
    std::vector<int> assignment(instances.size(), -1);
    {
      std::vector<std::tuple<double, std::size_t, int>> cand;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        for (std::size_t t = 0; t < tracks.size(); ++t) {
          cand.emplace_back((instances[i].centroid() - tracks[t].centroid).norm(), i, static_cast<int>(t));
        }
      }
      std::sort(cand.begin(), cand.end());
      std::vector<bool> used(tracks.size(), false);
      for (const auto& [d, i, t] : cand) {
        if (assignment[i] >= 0 || used[static_cast<std::size_t>(t)]) continue;
        assignment[i] = t;
        used[static_cast<std::size_t>(t)] = true;
      }
      std::vector<std::size_t> fresh;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        if (assignment[i] < 0) fresh.push_back(i);
      }
      std::sort(fresh.begin(), fresh.end(), [&](std::size_t a, std::size_t b) {
        return instances[a].centroid().x() < instances[b].centroid().x();
      });
      for (std::size_t i : fresh) {
        assignment[i] = static_cast<int>(tracks.size());
        tracks.push_back({instances[i].centroid(), -1, Stabilizer(model.cloud, k, opt.stabilizer)});
      }
    }

    // Split the pooled corner pairs by the nearest track seen last frame.
    std::map<int, MatchedPairs> pairs_by_track;
    for (std::size_t p = 0; p < rec.pairs.size(); ++p) {
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < tracks.size(); ++t) {
        if (tracks[t].last_frame != rec.index - 1) continue;
        const double d = (rec.pairs.prev[p] - tracks[t].centroid).norm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(t);
        }
      }
      if (best < 0) continue;
      pairs_by_track[best].prev.push_back(rec.pairs.prev[p]);
      pairs_by_track[best].cur.push_back(rec.pairs.cur[p]);
    }

    for (std::size_t i = 0; i < instances.size(); ++i) {
      const FootInstance& inst = instances[i];
      TrackState& ts = tracks[static_cast<std::size_t>(assignment[i])];
      TrackFrame tf;
      tf.track = assignment[i];
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t f = 0; f < rec.feet.size(); ++f) {
        const double d = instance_distance(inst, rec.feet[f].keypoints);
        if (d < best) {
          best = d;
          tf.truth_foot = static_cast<int>(f);
        }
      }
      // A gap in the track restarts its filter.
      if (ts.last_frame != rec.index - 1) ts.stabilizer.reset();
      ts.centroid = inst.centroid();
      ts.last_frame = rec.index;

      t0 = Clock::now();
      try {
        const PnpResult r = solve_pnp(correspondences_for(inst, model), k, opt.pnp);
        tf.measured = r.pose;
        tf.residual_px = r.residual_px;
        tf.measured_ok = true;
      } catch (const NonConvergenceError& e) {
        tf.flags.push_back(std::string("pnp: ") + e.what());
      } catch (const Error& e) {
        tf.flags.push_back(std::string("pnp: ") + e.what());
      }
      fr.timings.pnp += ms_since(t0);
      if (!tf.measured_ok) {
        ts.stabilizer.reset();
        fr.tracks.push_back(std::move(tf));
        continue;
      }

      t0 = Clock::now();
      tf.refined = tf.measured;
      if (opt.stabilize) {
        try {
          static const MatchedPairs kNone;
          const auto it = pairs_by_track.find(tf.track);
          const StabilizerStep step = ts.stabilizer.update(tf.measured, it == pairs_by_track.end() ? kNone : it->second);
          tf.refined = step.refined;
          tf.divergence = step.divergence;
          tf.w_r = step.w_r;
          tf.w_t = step.w_t;
          tf.pass_through = step.pass_through;
        } catch (const Error& e) {
          tf.flags.push_back(std::string("stabilize: ") + e.what());
          ts.stabilizer.reset();
        }
      }
      fr.timings.stabilize += ms_since(t0);

      if (tf.truth_foot >= 0) {
        const Pose& truth = rec.feet[static_cast<std::size_t>(tf.truth_foot)].pose;
        tf.error = pose_error(tf.refined, truth);
        tf.raw_error = pose_error(tf.measured, truth);
      }

      if (opt.occlusion && !rec.leg_mask.empty()) {
        t0 = Clock::now();
        try {
          const BinaryMask shoe = render_shoe_mask(model, tf.refined, k, opt.image_width, opt.image_height);
          OcclusionResult occ = generate_occlusion(shoe, rec.leg_mask);
          tf.occluded_pixels = occ.mask.count();
          tf.mask_ref = "frame" + std::to_string(rec.index) + "_track" + std::to_string(tf.track);
          if (opt.keep_masks) tf.mask = std::move(occ.mask);
        } catch (const Error& e) {
          tf.flags.push_back(std::string("occlusion: ") + e.what());
        }
        fr.timings.occlusion += ms_since(t0);
      }
      fr.tracks.push_back(std::move(tf));
    }
    if (instances.empty()) fr.errors.push_back("no complete foot instance");
    report.frames.push_back(std::move(fr));
  }
  report.aggregates = compute_aggregates(report.frames, model, k);
  return report;
}

std::vector<Pose> track_poses(const std::vector<FrameReport>& frames, int track, bool refined) {
  std::vector<Pose> poses;
  for (const FrameReport& fr : frames) {
    for (const TrackFrame& tf : fr.tracks) {
      if (tf.track == track && tf.measured_ok) poses.push_back(refined ? tf.refined : tf.measured);
    }
  }
  return poses;
}

Aggregates compute_aggregates(const std::vector<FrameReport>& frames, const FootModel& model, const Intrinsics& k) {
  Aggregates a;
  a.frames = static_cast<int>(frames.size());
  int measured = 0;
  std::map<int, int> last_label;
  for (const FrameReport& fr : frames) {
    a.failures += static_cast<int>(fr.errors.size());
    a.mean_ms.network += fr.timings.network;
    a.mean_ms.decode += fr.timings.decode;
    a.mean_ms.pnp += fr.timings.pnp;
    a.mean_ms.stabilize += fr.timings.stabilize;
    a.mean_ms.occlusion += fr.timings.occlusion;
    for (const TrackFrame& tf : fr.tracks) {
      a.tracks = std::max(a.tracks, tf.track + 1);
      a.failures += static_cast<int>(tf.flags.size());
      const auto it = last_label.find(tf.track);
      if (it != last_label.end() && it->second != tf.truth_foot) ++a.identity_swaps;
      last_label[tf.track] = tf.truth_foot;
      if (!tf.measured_ok) continue;
      ++measured;
      a.mean_euler_deg += tf.error.euler_deg;
      a.mean_translation_cm += tf.error.translation_cm;
      a.raw_mean_euler_deg += tf.raw_error.euler_deg;
      a.raw_mean_translation_cm += tf.raw_error.translation_cm;
    }
  }
  if (measured > 0) {
    a.mean_euler_deg /= measured;
    a.mean_translation_cm /= measured;
    a.raw_mean_euler_deg /= measured;
    a.raw_mean_translation_cm /= measured;
  }
  if (a.frames > 0) {
    a.mean_ms.network /= a.frames;
    a.mean_ms.decode /= a.frames;
    a.mean_ms.pnp /= a.frames;
    a.mean_ms.stabilize /= a.frames;
    a.mean_ms.occlusion /= a.frames;
  }
  a.pipeline_fps = a.mean_ms.pipeline() > 0.0 ? 1000.0 / a.mean_ms.pipeline() : 0.0;

  int jitter_tracks = 0;
  for (int t = 0; t < a.tracks; ++t) {
    const auto raw = track_poses(frames, t, false);
    if (raw.size() < 2) continue;
    a.jitter_raw += jitter_metric(raw, model, k);
    a.jitter_refined += jitter_metric(track_poses(frames, t, true), model, k);
    ++jitter_tracks;
  }
  if (jitter_tracks > 0) {
    a.jitter_raw /= jitter_tracks;
    a.jitter_refined /= jitter_tracks;
  }
  return a;
}

nlohmann::json to_json(const RunReport& report) {
  using nlohmann::json;
  const auto timings = [](const StageTimings& t) {
    return json{{"network_standin_ms", t.network},
                {"decode_group_ms", t.decode},
                {"pnp_ms", t.pnp},
                {"stabilize_ms", t.stabilize},
                {"pose_estimation_and_stabilization_ms", t.pose()},
                {"rendering_and_occlusion_ms", t.occlusion}};
  };
  json frames = json::array();
  for (const FrameReport& fr : report.frames) {
    json tracks = json::array();
    for (const TrackFrame& tf : fr.tracks) {
      json t = {{"track", tf.track}, {"truth_foot", tf.truth_foot}, {"flags", tf.flags}};
      if (tf.measured_ok) {
        t["measured"] = to_json(PoseRecord{fr.index, tf.track, tf.measured, {}});
        t["refined"] = to_json(PoseRecord{fr.index, tf.track, tf.refined, {}});
        t["residual_px"] = tf.residual_px;
        t["divergence_px"] = tf.divergence;
        t["w_r"] = tf.w_r;
        t["w_t"] = tf.w_t;
        t["pass_through"] = tf.pass_through;
        t["euler_error_deg"] = tf.error.euler_deg;
        t["translation_error_cm"] = tf.error.translation_cm;
        t["occluded_pixels"] = tf.occluded_pixels;
        t["mask_ref"] = tf.mask_ref;
      }
      tracks.push_back(t);
    }
    frames.push_back({{"frame", fr.index}, {"tracks", tracks}, {"errors", fr.errors}, {"timings", timings(fr.timings)}});
  }
  const Aggregates& a = report.aggregates;
  return {{"aggregates",
           {{"frames", a.frames},
            {"tracks", a.tracks},
            {"failures", a.failures},
            {"identity_swaps", a.identity_swaps},
            {"mean_euler_error_deg", a.mean_euler_deg},
            {"mean_translation_error_cm", a.mean_translation_cm},
            {"raw_mean_euler_error_deg", a.raw_mean_euler_deg},
            {"raw_mean_translation_error_cm", a.raw_mean_translation_cm},
            {"jitter_raw_px", a.jitter_raw},
            {"jitter_refined_px", a.jitter_refined},
            {"mean_timings", timings(a.mean_ms)},
            {"pipeline_fps", a.pipeline_fps}}},
          {"frames", frames}};
}

}  // namespace arshoe
