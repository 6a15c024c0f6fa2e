// Serial references against the OpenMP kernels on a 512x286 synthetic pair;
// end-to-end SGM on the full 1024x571 size.
#include <benchmark/benchmark.h>

#include <omp.h>

#include "stereogt/matchers.hpp"
#include "stereogt/oracle.hpp"
#include "stereogt/registration.hpp"

namespace {

using namespace stereogt;

struct Scene {
  GrayImage left, right;
  DepthRigScene rig;
};

Scene make_scene(int w, int h) {
  SceneSpec spec;
  spec.width = w;
  spec.height = h;
  spec.field = FieldKind::kBimodal;
  spec.disparity = 60.0;
  spec.near_disparity = 120.0;
  spec.ramp_dy = 0.05;
  const StereoSample st = synth_stereo(spec);
  RigTransform rig;
  rig.R = axis_angle(Eigen::Vector3d(0.2, 1.0, 0.1), 0.02);
  rig.t = Eigen::Vector3d(-60.0, 2.0, 5.0);
  return Scene{to_gray(st.left), to_gray(st.right), synth_depth_rig(spec, rig)};
}

const Scene& scene() {
  static const Scene s = make_scene(512, 286);
  return s;
}

const Scene& full_scene() {
  static const Scene s = make_scene(1024, 571);
  return s;
}

void set_threads(benchmark::State& state) {
  omp_set_num_threads(state.range(0) > 0 ? static_cast<int>(state.range(0)) : omp_get_num_procs());
}

void BM_BmCostSerial(benchmark::State& state) {
  const BmConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(serial::compute_cost_volume(scene().left, scene().right, cfg));
}

void BM_BmCostParallel(benchmark::State& state) {
  set_threads(state);
  const BmConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(compute_cost_volume(scene().left, scene().right, cfg));
}

void BM_CensusCostSerial(benchmark::State& state) {
  const SgmConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(serial::compute_cost_volume(scene().left, scene().right, cfg));
}

void BM_CensusCostParallel(benchmark::State& state) {
  set_threads(state);
  const SgmConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(compute_cost_volume(scene().left, scene().right, cfg));
}

void BM_AggregateSerial(benchmark::State& state) {
  const SgmConfig cfg;
  const CostVolume cv = compute_cost_volume(scene().left, scene().right, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(serial::aggregate_costs(cv, cfg));
}

void BM_AggregateParallel(benchmark::State& state) {
  set_threads(state);
  const SgmConfig cfg;
  const CostVolume cv = compute_cost_volume(scene().left, scene().right, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_costs(cv, cfg));
}

void BM_MatchSgm(benchmark::State& state) {
  set_threads(state);
  const SgmConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(match_sgm(full_scene().left, full_scene().right, cfg));
}

void BM_RegisterSerial(benchmark::State& state) {
  const DepthRigScene& s = scene().rig;
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::register_depth(s.depth, s.rig, s.k_mech, s.k_zed, s.geom, 512, 286));
  }
}

void BM_RegisterParallel(benchmark::State& state) {
  set_threads(state);
  const DepthRigScene& s = scene().rig;
  for (auto _ : state) {
    benchmark::DoNotOptimize(register_depth(s.depth, s.rig, s.k_mech, s.k_zed, s.geom, 512, 286));
  }
}

}  // namespace

BENCHMARK(BM_BmCostSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BmCostParallel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CensusCostSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CensusCostParallel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateParallel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatchSgm)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegisterSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegisterParallel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
