#include <benchmark/benchmark.h>

#include "arshoe/decode.hpp"
#include "arshoe/occlude.hpp"
#include "arshoe/pipeline.hpp"
#include "arshoe/simulate.hpp"
#include "arshoe/stabilize.hpp"

using namespace arshoe;

namespace {

struct Fixture {
  Config cfg;
  FootModel model = default_foot_model();
  std::vector<FrameRecord> frames;

  Fixture() {
    cfg.trajectory.frames = 32;
    cfg.trajectory.profile = MotionProfile::walk;
    frames = simulate_sequence(cfg, model);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

std::vector<Correspondence> first_correspondences() {
  const Fixture& f = fixture();
  auto inst = FootInstance::from_points(f.frames[0].feet[0].noisy_keypoints);
  return correspondences_for(inst, f.model);
}

}  // namespace

static void BM_DecodeGroup(benchmark::State& state) {
  const Fixture& f = fixture();
  const Skeleton sk = Skeleton::foot();
  for (auto _ : state) {
    auto inst = decode_instances(f.frames[0].tensors.heatmap, f.frames[0].tensors.pafmap, sk, f.cfg.decode);
    benchmark::DoNotOptimize(inst);
  }
}
BENCHMARK(BM_DecodeGroup);

static void BM_SolvePnp(benchmark::State& state) {
  const Fixture& f = fixture();
  const auto corr = first_correspondences();
  for (auto _ : state) {
    auto r = solve_pnp(corr, f.cfg.trajectory.intrinsics);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_SolvePnp);

static void BM_Stabilize(benchmark::State& state) {
  const Fixture& f = fixture();
  const Intrinsics& k = f.cfg.trajectory.intrinsics;
  const StabilizerState s{f.frames[0].feet[0].pose, true};
  for (auto _ : state) {
    auto step = stabilize(s, f.frames[1].feet[0].pose, f.frames[1].pairs, f.model.cloud, k);
    benchmark::DoNotOptimize(step);
  }
}
BENCHMARK(BM_Stabilize);

static void BM_RenderAndOcclude(benchmark::State& state) {
  const Fixture& f = fixture();
  const TrajectoryConfig& tc = f.cfg.trajectory;
  for (auto _ : state) {
    BinaryMask shoe = render_shoe_mask(f.model, f.frames[0].feet[0].pose, tc.intrinsics, tc.image_width, tc.image_height);
    auto occ = generate_occlusion(shoe, f.frames[0].leg_mask);
    benchmark::DoNotOptimize(occ);
  }
}
BENCHMARK(BM_RenderAndOcclude);

static void BM_Pipeline(benchmark::State& state) {
  const Fixture& f = fixture();
  const PipelineOptions opt = PipelineOptions::from_config(f.cfg);
  for (auto _ : state) {
    auto report = run_pipeline(f.frames, f.model, opt);
    benchmark::DoNotOptimize(report);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.frames.size()));
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
