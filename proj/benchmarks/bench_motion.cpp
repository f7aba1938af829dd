#include <benchmark/benchmark.h>

#include <random>

#include "sff/emd.hpp"
#include "sff/flow.hpp"
#include "sff/homography.hpp"

namespace {

using namespace sff;

Frame textured(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Frame f;
  f.width = w;
  f.height = h;
  f.gray.resize(static_cast<std::size_t>(w) * h);
  for (auto& v : f.gray) v = static_cast<std::uint8_t>(100 + (rng() % 56));
  for (int d = 0; d < w * h / 300; ++d) {
    int x = 1 + static_cast<int>(rng() % (w - 3));
    int y = 1 + static_cast<int>(rng() % (h - 3));
    std::uint8_t v = static_cast<std::uint8_t>(rng() % 2 ? 240 : 15);
    for (int yy = y; yy < y + 2; ++yy)
      for (int xx = x; xx < x + 2; ++xx) f.gray[static_cast<std::size_t>(yy) * w + xx] = v;
  }
  return f;
}

void BM_DetectFeatures(benchmark::State& state) {
  Frame f = textured(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 3 / 4, 7);
  DetectorConfig cfg;
  cfg.max_features = 200;
  for (auto _ : state) benchmark::DoNotOptimize(detect_features(f, cfg));
}
BENCHMARK(BM_DetectFeatures)->Arg(160)->Arg(320)->Arg(640);

void BM_MatchFeatures(benchmark::State& state) {
  DetectorConfig cfg;
  cfg.max_features = static_cast<int>(state.range(0));
  FeatureSet a = detect_features(textured(320, 240, 1), cfg);
  FeatureSet b = detect_features(textured(320, 240, 1), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(match_features(a, b));
}
BENCHMARK(BM_MatchFeatures)->Arg(100)->Arg(200)->Arg(400);

void BM_RansacHomography(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int n = static_cast<int>(state.range(0));
  MatchSet matches;
  std::vector<Keypoint> a, b;
  for (int i = 0; i < n; ++i) {
    float x = static_cast<float>(rng() % 300 + 10), y = static_cast<float>(rng() % 220 + 10);
    bool outlier = rng() % 10 < 3;
    a.push_back(Keypoint{x, y, 1});
    b.push_back(outlier ? Keypoint{static_cast<float>(rng() % 320),
                                   static_cast<float>(rng() % 240), 1}
                        : Keypoint{x + 8, y - 3, 1});
    matches.pairs.push_back(Match{i, i, 0});
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_homography_ransac(matches, a, b, RansacConfig{}));
}
BENCHMARK(BM_RansacHomography)->Arg(50)->Arg(200);

void BM_Emd1d(benchmark::State& state) {
  std::mt19937_64 rng(5);
  Histogram h1, h2;
  h1.bin_count = h2.bin_count = static_cast<int>(state.range(0));
  for (Histogram* h : {&h1, &h2}) {
    h->bins.assign(3, std::vector<double>(h->bin_count));
    for (auto& ch : h->bins) {
      double sum = 0;
      for (double& v : ch) {
        v = static_cast<double>(rng() % 1000 + 1);
        sum += v;
      }
      for (double& v : ch) v /= sum;
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(emd_1d(h1, h2));
}
BENCHMARK(BM_Emd1d)->Arg(32)->Arg(256);

}  // namespace
