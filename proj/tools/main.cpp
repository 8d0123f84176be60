// arshoe command-line front end. Exit codes: 0 success, 1 usage error,
// 2 data or format error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "arshoe/config.hpp"
#include "arshoe/decode.hpp"
#include "arshoe/metrics.hpp"
#include "arshoe/occlude.hpp"
#include "arshoe/pipeline.hpp"
#include "arshoe/records.hpp"
#include "arshoe/simulate.hpp"
#include "arshoe/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace arshoe;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;

FootModel load_model(const std::string& path) {
  return path.empty() ? default_foot_model() : read_foot_model(path);
}

void add_intrinsics(CLI::App* cmd, Intrinsics& k) {
  cmd->add_option("--fx", k.fx, "focal length x (px)");
  cmd->add_option("--fy", k.fy, "focal length y (px)");
  cmd->add_option("--cx", k.cx, "principal point x (px)");
  cmd->add_option("--cy", k.cy, "principal point y (px)");
}

// Writes to `path`, or stdout when it is empty or "-".
template <typename F>
void with_output(const std::string& path, F&& f) {
  if (path.empty() || path == "-") {
    f(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::format, "cannot write " + path);
  f(out);
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, const std::string& model_path) {
  const Config cfg = load_config(config_path);
  const FootModel model = load_model(model_path);
  const auto frames = simulate_sequence(cfg, model);
  save_run(out_dir, cfg, frames);
  std::cerr << "wrote " << frames.size() << " frames to " << out_dir << '\n';
  return 0;
}

int cmd_decode(const std::string& tensors_path, const std::string& out_path, double stride, const DecodeConfig& dc) {
  const auto tensors = read_tensors(tensors_path);
  if (tensors.size() < 2) throw Error(Errc::format, tensors_path + ": expected heatmap and PAF tensors");
  KeypointSet set{true, stride, decode_instances(tensors[0], tensors[1], Skeleton::foot(), dc)};
  with_output(out_path, [&](std::ostream& out) { out << to_json(set).dump(2) << '\n'; });
  return 0;
}

int cmd_pnp(const std::string& keypoints_path, const std::string& model_path, const Intrinsics& k,
            const std::string& out_path) {
  k.validate();
  const FootModel model = read_foot_model(model_path);
  const KeypointSet set = keypoint_set_from_json(read_json_file(keypoints_path));
  std::vector<PoseRecord> poses;
  int failures = 0;
  const auto instances = set.image_instances();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    try {
      const PnpResult r = solve_pnp(correspondences_for(instances[i], model), k);
      poses.push_back({0, static_cast<int>(i), r.pose, {}});
      std::cerr << "instance " << i << ": residual " << r.residual_px << " px, " << r.iterations << " iterations\n";
    } catch (const Error& e) {
      std::cerr << "instance " << i << ": " << e.what() << '\n';
      ++failures;
    }
  }
  with_output(out_path, [&](std::ostream& out) { write_pose_jsonl(out, poses); });
  return failures ? kData : 0;
}

int cmd_stabilize(const std::string& poses_path, const std::string& pairs_path, const std::string& model_path,
                  const Intrinsics& k, const StabilizerConfig& cfg, const std::string& out_path) {
  const FootModel model = load_model(model_path);
  const auto poses = read_pose_jsonl(fs::path(poses_path));
  std::map<std::pair<int, int>, MatchedPairs> pairs;
  for (PairsRecord& r : read_pairs_jsonl(pairs_path)) pairs[{r.track, r.frame}] = std::move(r.pairs);

  std::map<int, Stabilizer> streams;
  std::vector<PoseRecord> out;
  for (const PoseRecord& rec : poses) {
    auto it = streams.try_emplace(rec.track, model.cloud, k, cfg).first;
    const auto p = pairs.find({rec.track, rec.frame});
    const StabilizerStep step = it->second.update(rec.pose, p == pairs.end() ? MatchedPairs{} : p->second);
    PoseRecord r{rec.frame, rec.track, step.refined, rec.flags};
    if (step.pass_through) r.flags.push_back("pass_through");
    out.push_back(std::move(r));
  }
  with_output(out_path, [&](std::ostream& o) { write_pose_jsonl(o, out); });
  return 0;
}

int cmd_occlude(const std::string& shoe_path, const std::string& leg_path, const std::string& out_path) {
  const BinaryMask shoe = read_mask_pgm(shoe_path);
  const BinaryMask leg = read_mask_pgm(leg_path);
  if (shoe.width() != leg.width() || shoe.height() != leg.height()) {
    throw Error(Errc::format, "shoe and leg masks differ in size");
  }
  const OcclusionResult r = generate_occlusion(shoe, leg);
  write_mask_pgm(out_path, r.mask);
  std::cerr << (r.occluded ? "occluded " : "no occlusion, ") << r.mask.count() << " px\n";
  return 0;
}

int cmd_eval(const std::string& run_dir, const std::string& report_path, const std::string& model_path,
             bool stabilize, bool write_masks) {
  const FootModel model = load_model(model_path);
  const LoadedRun run = load_run(run_dir, model);
  PipelineOptions opt = PipelineOptions::from_config(run.config);
  opt.stabilize = stabilize;
  opt.keep_masks = write_masks;
  const RunReport report = run_pipeline(run.frames, model, opt);
  if (write_masks) {
    const fs::path dir = fs::path(run_dir) / "occlusion";
    fs::create_directories(dir);
    for (const FrameReport& fr : report.frames) {
      for (const TrackFrame& tf : fr.tracks) {
        if (!tf.mask.empty()) write_mask_pgm(dir / (tf.mask_ref + ".pgm"), tf.mask);
      }
    }
  }
  write_json_file(report_path, to_json(report));
  const Aggregates& a = report.aggregates;
  std::cerr << "euler " << a.mean_euler_deg << " deg, translation " << a.mean_translation_cm << " cm, jitter "
            << a.jitter_raw << " -> " << a.jitter_refined << " px/frame, " << a.failures << " failures\n";
  return 0;
}

int cmd_bench(int frames, bool two_feet, std::uint64_t seed) {
  if (frames < 2) throw CLI::ValidationError("--frames", "must be at least 2");
  Config cfg;
  cfg.trajectory.frames = frames;
  cfg.trajectory.profile = MotionProfile::walk;
  cfg.trajectory.two_feet = two_feet;
  cfg.trajectory.seed = seed;
  const FootModel model = default_foot_model();
  const auto records = simulate_sequence(cfg, model);
  const RunReport report = run_pipeline(records, model, PipelineOptions::from_config(cfg));
  const StageTimings& t = report.aggregates.mean_ms;
  std::cout << "frames                               " << frames << '\n'
            << "network stand-in (simulation) ms     " << t.network << '\n'
            << "pose estimation and stabilization ms " << t.pose() << '\n'
            << "  decode + group ms                  " << t.decode << '\n'
            << "  pnp ms                             " << t.pnp << '\n'
            << "  stabilize ms                       " << t.stabilize << '\n'
            << "rendering and occlusion ms           " << t.occlusion << '\n'
            << "pipeline fps                         " << report.aggregates.pipeline_fps << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARShoe pose, stabilization and occlusion pipeline"};
  app.require_subcommand(1);

  std::string config_path, out, model_path, tensors_path, keypoints_path, poses_path, pairs_path, shoe_path,
      leg_path, run_dir, report_path;
  Intrinsics k;
  double stride = 4.0;
  DecodeConfig dc;
  StabilizerConfig sc;
  bool literal_eq5 = false, no_clamp = false, raw_prev = false, no_stabilize = false, write_masks = false,
       two_feet = false;
  int frames = 300;
  std::uint64_t seed = 1;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic run directory");
  sim->add_option("--config", config_path, "JSON config")->required();
  sim->add_option("--out", out, "output directory")->required();
  sim->add_option("--model", model_path, "foot model file (default: built-in)");

  auto* dec = app.add_subcommand("decode", "decode heatmap/PAF tensors into foot instances");
  dec->add_option("--tensors", tensors_path, "tensor file (heatmap, PAF[, segmentation])")->required();
  dec->add_option("--out", out, "output JSON (default stdout)");
  dec->add_option("--stride", stride, "image pixels per tensor pixel");
  dec->add_option("--threshold", dc.threshold);
  dec->add_option("--nms-radius", dc.nms_radius);
  dec->add_option("--min-score", dc.min_score);

  auto* pnp = app.add_subcommand("pnp", "estimate 6-DoF poses from grouped keypoints");
  pnp->add_option("--keypoints", keypoints_path, "keypoints JSON")->required();
  pnp->add_option("--model", model_path, "foot model file")->required();
  pnp->add_option("--out", out, "pose JSONL (default stdout)");
  add_intrinsics(pnp, k);

  auto* stab = app.add_subcommand("stabilize", "refine a pose stream with corner flow");
  stab->add_option("--poses", poses_path, "pose JSONL")->required();
  stab->add_option("--pairs", pairs_path, "pairs JSONL")->required();
  stab->add_option("--model", model_path, "foot model file (default: built-in)");
  stab->add_option("--out", out, "pose JSONL (default stdout)");
  stab->add_option("--alpha", sc.alpha);
  stab->add_option("--beta", sc.beta);
  stab->add_option("--d-floor", sc.d_floor);
  stab->add_flag("--literal-eq5", literal_eq5, "predict from the current measured translation");
  stab->add_flag("--no-clamp", no_clamp, "do not clamp the rotation weight to [0, 1]");
  stab->add_flag("--raw-prev", raw_prev, "keep the raw measured pose as the previous pose");
  add_intrinsics(stab, k);

  auto* occ = app.add_subcommand("occlude", "occlusion mask from shoe render and leg masks");
  occ->add_option("--shoe-mask", shoe_path, "PGM")->required();
  occ->add_option("--leg-mask", leg_path, "PGM")->required();
  occ->add_option("--out", out, "output PGM")->required();

  auto* ev = app.add_subcommand("eval", "run the pipeline over a simulated run directory");
  ev->add_option("--run", run_dir, "run directory")->required();
  ev->add_option("--report", report_path, "report JSON")->required();
  ev->add_option("--model", model_path, "foot model file (default: built-in)");
  ev->add_flag("--no-stabilize", no_stabilize, "report raw PnP poses");
  ev->add_flag("--write-masks", write_masks, "write occlusion masks under <run>/occlusion");

  auto* bench = app.add_subcommand("bench", "time the pipeline on a synthetic walk");
  bench->add_option("--frames", frames, "frame count")->required();
  bench->add_option("--seed", seed);
  bench->add_flag("--two-feet", two_feet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  sc.translation_prediction = literal_eq5 ? TranslationPrediction::literal_eq5 : TranslationPrediction::propagate_prev;
  sc.weight_clamp = !no_clamp;
  sc.prev_pose_source = raw_prev ? PrevPoseSource::raw : PrevPoseSource::refined;

  try {
    if (*sim) return cmd_simulate(config_path, out, model_path);
    if (*dec) return cmd_decode(tensors_path, out, stride, dc);
    if (*pnp) return cmd_pnp(keypoints_path, model_path, k, out);
    if (*stab) {
      k.validate();
      sc.validate();
      return cmd_stabilize(poses_path, pairs_path, model_path, k, sc, out);
    }
    if (*occ) return cmd_occlude(shoe_path, leg_path, out);
    if (*ev) return cmd_eval(run_dir, report_path, model_path, !no_stabilize, write_masks);
    if (*bench) return cmd_bench(frames, two_feet, seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
