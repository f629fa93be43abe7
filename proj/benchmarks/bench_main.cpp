#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "riseg/correction.hpp"
#include "riseg/episode.hpp"
#include "riseg/frames.hpp"
#include "riseg/grouping.hpp"
#include "riseg/hungarian.hpp"
#include "riseg/kmeans.hpp"
#include "riseg/oracles.hpp"
#include "riseg/planner.hpp"
#include "riseg/rng.hpp"
#include "riseg/se3.hpp"

using namespace riseg;

namespace {

// A pushed five-object scene with sampled frames, shared by several cases.
struct PushedScene {
  SceneState before, after;
  LabelMask merged, static_t1;
  FlowField flow;
  FramePairs frames;
  std::vector<se3::Twist> twists;
};

const PushedScene& pushed_scene() {
  static const PushedScene s = [] {
    PushedScene p;
    p.before = generate_scene(12, 5);
    p.merged = oracle_static_seg(p.before, {}, 12).labels;
    const auto obs = oracle_static_seg(p.before, {}, 12);
    auto action = find_action(obs.uncertainty, {}, 12);
    if (!action) action = PushAction{{128, 128}, {0.0, 1.0}, 0.02};
    p.after = apply_push(p.before, *action);
    p.flow = oracle_flow(p.before, p.after, 0.3, 12);
    p.static_t1 = oracle_static_seg(p.after, {}, 12).labels;
    p.frames = sample_frames(p.merged, p.flow, p.before.geometry(), {}, 12);
    p.twists = compute_bfifs(p.frames.at_t, p.frames.at_t1);
    return p;
  }();
  return s;
}

const GroupingModel& model() {
  static const GroupingModel m = train_command(10, 3, RunConfig{});
  return m;
}

void BM_SpatialTwist(benchmark::State& state) {
  const auto method = static_cast<se3::TwistMethod>(state.range(0));
  const se3::Pose a = se3::frame_from_triplet({0.01, 0.02, 0.0}, {0.02, 0.02, 0.001}, {0.012, 0.03, 0.0});
  const se3::Pose d = se3::exp_twist({{0.0, 0.01, 0.2}, {0.01, -0.02, 0.0}});
  const se3::Pose b = d * a;
  for (auto _ : state) benchmark::DoNotOptimize(se3::spatial_twist(a, b, 1.0, method));
}
BENCHMARK(BM_SpatialTwist)->Arg(0)->Arg(1)->Arg(2);

void BM_KMeansElbow(benchmark::State& state) {
  const auto obs = oracle_static_seg(generate_scene(5, static_cast<int>(state.range(0))), {}, 5);
  const auto px = threshold_pixels(obs.uncertainty, 150, 256);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_elbow(px, ClusterKind::Certain, 5));
  state.counters["pixels"] = static_cast<double>(px.size());
}
BENCHMARK(BM_KMeansElbow)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_FindAction(benchmark::State& state) {
  const auto obs = oracle_static_seg(generate_scene(7, 6), {}, 7);
  for (auto _ : state) benchmark::DoNotOptimize(find_action(obs.uncertainty, {}, 7));
}
BENCHMARK(BM_FindAction)->Unit(benchmark::kMillisecond);

void BM_SolveAssignment(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<double> cost(n * n);
  for (auto& v : cost) v = uniform(rng, -1.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(cost, n, n));
}
BENCHMARK(BM_SolveAssignment)->RangeMultiplier(2)->Range(4, 64);

void BM_Evaluate(benchmark::State& state) {
  const PushedScene& p = pushed_scene();
  const LabelMask gt = render_labels(p.after);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(p.static_t1, gt));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

void BM_Posterior(benchmark::State& state) {
  const PushedScene& p = pushed_scene();
  const auto f = pair_feature(p.twists[0], p.twists[1], model().mode);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_same(model(), f));
}
BENCHMARK(BM_Posterior);

void BM_GroupBfifs(benchmark::State& state) {
  const PushedScene& p = pushed_scene();
  for (auto _ : state)
    benchmark::DoNotOptimize(group_bfifs(p.twists, p.frames.at_t, p.frames.at_t1, model(), 0.5, 1.0));
  state.counters["frames"] = static_cast<double>(p.twists.size());
}
BENCHMARK(BM_GroupBfifs)->Unit(benchmark::kMillisecond);

void BM_ProjectAndCorrect(benchmark::State& state) {
  const PushedScene& p = pushed_scene();
  const FrameGrouping g = group_bfifs(p.twists, p.frames.at_t, p.frames.at_t1, model(), 0.5, 1.0);
  for (auto _ : state) {
    const Projection proj = project(p.merged, p.flow, p.static_t1);
    benchmark::DoNotOptimize(correct_mask(proj.mask, p.static_t1, g, p.frames.at_t1, proj.flow_t1, {}, &p.frames.at_t));
  }
}
BENCHMARK(BM_ProjectAndCorrect)->Unit(benchmark::kMillisecond);

void BM_Episode(benchmark::State& state) {
  const SceneState s = generate_scene(21, 5);
  for (auto _ : state) benchmark::DoNotOptimize(run_episode("bench", s, model(), RunConfig{}));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
