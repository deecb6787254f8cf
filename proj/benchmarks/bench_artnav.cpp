#include <benchmark/benchmark.h>

#include "artnav/map_pipeline.hpp"
#include "artnav/planner.hpp"
#include "artnav/reachability.hpp"
#include "artnav/world.hpp"

using namespace artnav;

namespace {

GroundTruthWorld terrain() {
  GroundTruthWorld w(200, 200, 0.04, {-4.0, -4.0});
  w.fill_ramp_x(-1.0, -4.0, 1.0, -1.0, 0.0, 0.3, true);
  w.fill_ground(1.0, -4.0, 3.0, -1.0, 0.3, true);
  w.fill_disk(0.5, 1.5, 0.4, 1.0, false);
  w.fill_disk(-2.0, 2.0, 0.3, 0.8, false);
  w.fill_ground(-3.0, 0.0, -2.6, 1.0, 0.12, true);
  w.fill_ceiling(2.0, 0.5, 3.5, 2.5, 1.0, 1.4);
  return w;
}

const GroundTruthWorld& world() {
  static const GroundTruthWorld w = terrain();
  return w;
}

const PointCloud& cloud() {
  static const PointCloud c = sense(world(), 0.0, 0.0, 0.0, SensorModel{});
  return c;
}

HeightMap processed() {
  return process_frame(HeightMap::centered_at(200, 200, 0.04, {0.0, 0.0}), cloud(), RobotFrame{{0.0, 0.0}, 0.0},
                       PipelineParams{});
}

const HeightMap& known_map() {
  static const HeightMap m = [] {
    HeightMap h = world().to_height_map();
    score_footholds(h, FootholdModel{});
    apply_safety_margin(h, SafetyParams{});
    return h;
  }();
  return m;
}

void BM_Sense(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sense(world(), 0.0, 0.0, 0.0, SensorModel{}));
  state.counters["points"] = static_cast<double>(cloud().points.size());
}
BENCHMARK(BM_Sense)->Unit(benchmark::kMillisecond);

void BM_ProcessFrame(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(processed());
}
BENCHMARK(BM_ProcessFrame)->Unit(benchmark::kMillisecond);

void BM_SafetyMargin(benchmark::State& state) {
  HeightMap m = world().to_height_map();
  score_footholds(m, FootholdModel{});
  for (auto _ : state) {
    HeightMap copy = m;
    apply_safety_margin(copy, SafetyParams{});
    benchmark::DoNotOptimize(copy);
  }
}
BENCHMARK(BM_SafetyMargin)->Unit(benchmark::kMillisecond);

void BM_CheckPose(benchmark::State& state) {
  const RobotShape s = RobotShape::anymal_like();
  const auto p = augment_pose(known_map(), s, 0.0, -2.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(check_pose(known_map(), s, *p));
}
BENCHMARK(BM_CheckPose);

void BM_SurrogateEdge(benchmark::State& state) {
  const SurrogateBackend b;
  const MotionQuery q = edge_query(Pose{-1.0, -2.0, 0.55, 0.0, 0.0, 0.0}, Pose{-0.2, -1.6, 0.6, 0.4, 0.0, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(b.evaluate(known_map(), q));
}
BENCHMARK(BM_SurrogateEdge);

void BM_BuildGraph(benchmark::State& state) {
  const RobotShape s = RobotShape::anymal_like();
  const PlannerConfig c;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(build_graph(known_map(), s, Pose{-3.0, -3.0, 0.0, 0.0, 0.0, 0.0},
                                         {Pose{3.0, 3.0, 0.0, 0.0, 0.0, 0.0}}, c, rng));
  }
}
BENCHMARK(BM_BuildGraph)->Unit(benchmark::kMillisecond);

void BM_Plan(benchmark::State& state) {
  const RobotShape s = RobotShape::anymal_like();
  PlannerConfig c;
  c.threads = static_cast<unsigned>(state.range(0));
  const auto backend = make_backend(c, s);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(plan(known_map(), s, Pose{-3.0, -3.0, 0.0, 0.0, 0.0, 0.0},
                                  Pose{3.0, 3.0, 0.0, 0.0, 0.0, 0.0}, c, *backend, rng));
  }
}
BENCHMARK(BM_Plan)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
