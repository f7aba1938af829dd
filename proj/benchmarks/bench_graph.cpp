#include <benchmark/benchmark.h>

#include <random>

#include "sff/segmentation.hpp"
#include "sff/transition_graph.hpp"

namespace {

using namespace sff;

void BM_BuildAndSolveSegmentGraph(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  SemanticProfile profile;
  profile.scores.assign(frames, 0.0);
  std::mt19937_64 rng(11);
  std::vector<float> noise(static_cast<std::size_t>(frames) * 101);
  for (auto& v : noise) v = static_cast<float>(rng() % 1000) / 1000.0f;
  CostFn costs = [&](int i, int j) {
    float v = noise[static_cast<std::size_t>(i) * 101 + (j - i)];
    return PairCosts{v, v * 0.5, 0.01 * (j - i)};
  };
  GraphConfig cfg;
  Segment seg{0, frames - 1, SegmentKind::non_semantic, 10};
  for (auto _ : state) {
    TransitionGraph g = build_segment_graph(seg, profile, costs, cfg);
    benchmark::DoNotOptimize(bellman_ford(g));
  }
}
BENCHMARK(BM_BuildAndSolveSegmentGraph)->Arg(500)->Arg(1500)->Arg(3000);

void BM_OtsuThreshold(benchmark::State& state) {
  std::mt19937_64 rng(7);
  SemanticProfile profile;
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i)
    profile.scores.push_back(rng() % 2 ? 0.0 : static_cast<double>(rng() % 100000) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(otsu_threshold(profile, 256));
}
BENCHMARK(BM_OtsuThreshold)->Arg(3000)->Arg(30000);

}  // namespace
