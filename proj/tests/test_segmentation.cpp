#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sff/segmentation.hpp"
#include "test_util.hpp"

using namespace sff;

namespace {

// Independent Otsu oracle: per split, recompute both class moments from
// scratch and compare the between-class variance keys exactly.
int oracle_otsu_split(const std::vector<double>& scores, int bins) {
  double lo = *std::min_element(scores.begin(), scores.end());
  double hi = *std::max_element(scores.begin(), scores.end());
  REQUIRE(lo < hi);
  std::vector<long> counts(bins, 0);
  for (double x : scores) {
    int b = static_cast<int>((x - lo) / (hi - lo) * bins);
    ++counts[std::clamp(b, 0, bins - 1)];
  }
  std::vector<int> best;
  __int128 best_num = 0, best_den = 1;
  for (int t = 1; t < bins; ++t) {
    long n0 = 0, s0 = 0, n1 = 0, s1 = 0;
    for (int b = 0; b < t; ++b) {
      n0 += counts[b];
      s0 += counts[b] * static_cast<long>(b);
    }
    for (int b = t; b < bins; ++b) {
      n1 += counts[b];
      s1 += counts[b] * static_cast<long>(b);
    }
    if (n0 == 0 || n1 == 0) continue;
    __int128 diff = static_cast<__int128>(s0) * n1 - static_cast<__int128>(s1) * n0;
    __int128 num = diff * diff;
    __int128 den = static_cast<__int128>(n0) * n1;
    if (best.empty() || num * best_den > best_num * den) {
      best.assign(1, t);
      best_num = num;
      best_den = den;
    } else if (num * best_den == best_num * den) {
      best.push_back(t);
    }
  }
  REQUIRE(!best.empty());
  long sum = 0;
  for (int t : best) sum += t;
  return static_cast<int>(sum / static_cast<long>(best.size()));
}

std::vector<double> random_profile(std::mt19937_64& rng) {
  int n = 3 + static_cast<int>(sfftest::uniform01(rng) * 400);
  std::vector<double> scores(n);
  int style = static_cast<int>(sfftest::uniform01(rng) * 3);
  for (double& s : scores) {
    double u = sfftest::uniform01(rng);
    if (style == 0)
      s = u < 0.5 ? sfftest::uniform01(rng) * 5 : 40 + sfftest::uniform01(rng) * 20;
    else if (style == 1)
      s = sfftest::uniform01(rng) * 100;
    else
      s = std::floor(sfftest::uniform01(rng) * 8) * 13.0;  // heavy ties and plateaus
  }
  return scores;
}

}  // namespace

TEST_CASE("otsu splits a perfect bimodal profile strictly between the modes") {
  SemanticProfile p;
  p.scores.assign(50, 0.0);
  p.scores.insert(p.scores.end(), 50, 100.0);
  OtsuResult r = otsu_threshold(p, 256);
  CHECK_FALSE(r.degenerate);
  CHECK(r.threshold > 0.0);
  CHECK(r.threshold < 100.0);
  std::vector<Segment> segs = segment_by_threshold(p, r.threshold, 1);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].kind == SegmentKind::non_semantic);
  CHECK(segs[1].kind == SegmentKind::semantic);
}

TEST_CASE("otsu flags an all-identical profile as degenerate") {
  SemanticProfile p;
  p.scores.assign(20, 7.0);
  OtsuResult r = otsu_threshold(p, 256);
  CHECK(r.degenerate);
  CHECK(r.threshold == 7.0);
  std::vector<Segment> segs = segment_by_threshold(p, r.threshold, 1);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].kind == SegmentKind::non_semantic);
}

TEST_CASE("otsu separates two gaussian clusters where the oracle says") {
  std::mt19937_64 rng(2024);
  auto normal = [&](double mean, double sd) {
    double u1 = sfftest::uniform01(rng), u2 = sfftest::uniform01(rng);
    if (u1 < 1e-12) u1 = 1e-12;
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };
  SemanticProfile p;
  for (int i = 0; i < 100; ++i) p.scores.push_back(std::max(0.0, normal(10, 1)));
  for (int i = 0; i < 100; ++i) p.scores.push_back(std::max(0.0, normal(50, 1)));

  OtsuResult r = otsu_threshold(p, 100);
  CHECK(r.threshold > 20.0);
  CHECK(r.threshold < 40.0);
  CHECK(r.split_bin == oracle_otsu_split(p.scores, 100));
}

TEST_CASE("otsu equals the exhaustive maximizer on random profiles") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    SemanticProfile p;
    p.scores = random_profile(rng);
    double lo = *std::min_element(p.scores.begin(), p.scores.end());
    double hi = *std::max_element(p.scores.begin(), p.scores.end());
    if (lo == hi) continue;
    OtsuResult r = otsu_threshold(p, 256);
    int oracle = oracle_otsu_split(p.scores, 256);
    CHECK(r.split_bin == oracle);
    CHECK(r.threshold == lo + oracle * (hi - lo) / 256);
  }
}

TEST_CASE("segment_by_threshold splits runs and honors min_len") {
  SemanticProfile p;
  SUBCASE("direct thresholding") {
    p.scores = {0, 0, 5, 5, 0, 0};
    std::vector<Segment> segs = segment_by_threshold(p, 1.0, 1);
    REQUIRE(segs.size() == 3);
    CHECK(segs[0].start == 0);
    CHECK(segs[0].end == 1);
    CHECK(segs[0].kind == SegmentKind::non_semantic);
    CHECK(segs[1].start == 2);
    CHECK(segs[1].end == 3);
    CHECK(segs[1].kind == SegmentKind::semantic);
    CHECK(segs[2].start == 4);
    CHECK(segs[2].end == 5);
    CHECK(segs[2].kind == SegmentKind::non_semantic);
  }
  SUBCASE("everything below threshold is one segment") {
    p.scores = {0, 0.5, 0.2, 0.9};
    std::vector<Segment> segs = segment_by_threshold(p, 1.0, 1);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].kind == SegmentKind::non_semantic);
    CHECK(segs[0].length() == 4);
  }
  SUBCASE("short runs merge into the surroundings") {
    p.scores = {0, 9, 0};
    std::vector<Segment> segs = segment_by_threshold(p, 1.0, 2);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].kind == SegmentKind::non_semantic);
    CHECK(segs[0].start == 0);
    CHECK(segs[0].end == 2);
  }
}

TEST_CASE("segmentation always tiles the timeline with alternating kinds") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    SemanticProfile p;
    p.scores = random_profile(rng);
    double threshold = sfftest::uniform01(rng) * 100;
    int min_len = 1 + static_cast<int>(sfftest::uniform01(rng) * 5);
    std::vector<Segment> segs = segment_by_threshold(p, threshold, min_len);
    REQUIRE_FALSE(segs.empty());
    CHECK(segs.front().start == 0);
    CHECK(segs.back().end == static_cast<int>(p.scores.size()) - 1);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].start <= segs[i].end);
      if (i > 0) {
        CHECK(segs[i].start == segs[i - 1].end + 1);
        CHECK(segs[i].kind != segs[i - 1].kind);
      }
      if (segs.size() > 1) CHECK(segs[i].length() >= min_len);
    }
  }
}

TEST_CASE("class_lengths sums by kind") {
  std::vector<Segment> segs{{0, 9, SegmentKind::non_semantic, 0},
                            {10, 14, SegmentKind::semantic, 0},
                            {15, 19, SegmentKind::non_semantic, 0}};
  ClassLengths l = class_lengths(segs);
  CHECK(l.semantic == 5);
  CHECK(l.non_semantic == 15);
}
