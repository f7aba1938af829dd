#include "sff/segmentation.hpp"

#include <algorithm>
#include <cmath>

namespace sff {

namespace {

// Between-class variance comparison in exact integer arithmetic.
// With integer bin counts n and first moments s (over bin indices),
// sigma_b^2(t) is proportional to (s0*n1 - s1*n0)^2 / (n0*n1), so two
// splits compare by cross-multiplying with __int128. Exact up to
// N ~ 3e5 samples; beyond that long double keeps ~64 mantissa bits.
struct SplitKey {
  __int128 num = 0;  // (s0*n1 - s1*n0)^2
  __int128 den = 1;  // n0*n1
  long double approx = 0.0L;
  bool exact = true;

  bool better_than(const SplitKey& o) const {
    if (exact && o.exact) return num * o.den > o.num * den;
    return approx > o.approx;
  }
  bool equals(const SplitKey& o) const {
    if (exact && o.exact) return num * o.den == o.num * den;
    return approx == o.approx;
  }
};

SplitKey split_key(long n0, long s0, long n1, long s1, bool exact) {
  SplitKey k;
  k.exact = exact;
  if (exact) {
    __int128 d = static_cast<__int128>(s0) * n1 - static_cast<__int128>(s1) * n0;
    k.num = d * d;
    k.den = static_cast<__int128>(n0) * n1;
  } else {
    long double d = static_cast<long double>(s0) * n1 - static_cast<long double>(s1) * n0;
    k.approx = d * d / (static_cast<long double>(n0) * n1);
  }
  return k;
}

}  // namespace

OtsuResult otsu_threshold(const SemanticProfile& scores, int bin_count) {
  const std::vector<double>& v = scores.scores;
  if (v.empty()) throw Error(Errc::invalid_argument, "empty profile");
  if (bin_count < 2) throw Error(Errc::invalid_argument, "need at least 2 bins");

  auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) return OtsuResult{lo, true, 0};

  std::vector<long> counts(bin_count, 0);
  for (double x : v) {
    int b = static_cast<int>((x - lo) / (hi - lo) * bin_count);
    if (b >= bin_count) b = bin_count - 1;
    if (b < 0) b = 0;
    ++counts[b];
  }

  const bool exact = v.size() <= 300000;
  long total_n = 0, total_s = 0;
  for (int b = 0; b < bin_count; ++b) {
    total_n += counts[b];
    total_s += counts[b] * static_cast<long>(b);
  }

  // Empty bins between clusters make whole runs of splits score equally;
  // the plateau resolves to its mean split so the threshold lands between
  // the classes rather than hugging one of them.
  std::vector<int> best_splits;
  SplitKey best;
  long n0 = 0, s0 = 0;
  for (int t = 1; t < bin_count; ++t) {
    n0 += counts[t - 1];
    s0 += counts[t - 1] * static_cast<long>(t - 1);
    long n1 = total_n - n0;
    if (n0 == 0 || n1 == 0) continue;
    SplitKey k = split_key(n0, s0, n1, total_s - s0, exact);
    if (best_splits.empty() || k.better_than(best)) {
      best = k;
      best_splits.assign(1, t);
    } else if (k.equals(best)) {
      best_splits.push_back(t);
    }
  }
  if (best_splits.empty()) return OtsuResult{lo, true, 0};  // single occupied bin

  long sum = 0;
  for (int t : best_splits) sum += t;
  int best_split = static_cast<int>(sum / static_cast<long>(best_splits.size()));

  double threshold = lo + static_cast<double>(best_split) * (hi - lo) / bin_count;
  return OtsuResult{threshold, false, best_split};
}

std::vector<Segment> segment_by_threshold(const SemanticProfile& scores, double threshold,
                                          int min_len) {
  const std::vector<double>& v = scores.scores;
  if (v.empty()) return {};
  if (!std::isfinite(threshold)) throw Error(Errc::invalid_argument, "threshold must be finite");
  if (min_len < 1) min_len = 1;

  std::vector<Segment> runs;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    SegmentKind kind = v[i] > threshold ? SegmentKind::semantic : SegmentKind::non_semantic;
    if (!runs.empty() && runs.back().kind == kind) {
      runs.back().end = i;
    } else {
      runs.push_back(Segment{i, i, kind, 0});
    }
  }

  // Absorb short runs into their surroundings until stable. Flipping a
  // run's kind merges it with both neighbors (kinds alternate). Interior
  // runs dissolve first: a short run between two longer ones is the
  // flicker being removed, not its surroundings.
  while (runs.size() > 1) {
    std::size_t shortest = runs.size();
    auto rank = [&](std::size_t i) {
      bool interior = i > 0 && i + 1 < runs.size();
      return std::make_pair(runs[i].length(), interior ? 0 : 1);
    };
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].length() >= min_len) continue;
      if (shortest == runs.size() || rank(i) < rank(shortest)) shortest = i;
    }
    if (shortest == runs.size()) break;
    runs[shortest].kind = runs[shortest].kind == SegmentKind::semantic
                              ? SegmentKind::non_semantic
                              : SegmentKind::semantic;
    std::vector<Segment> merged;
    for (const Segment& s : runs) {
      if (!merged.empty() && merged.back().kind == s.kind)
        merged.back().end = s.end;
      else
        merged.push_back(s);
    }
    runs.swap(merged);
  }
  return runs;
}

ClassLengths class_lengths(const std::vector<Segment>& segments) {
  ClassLengths lengths;
  for (const Segment& s : segments) {
    if (s.kind == SegmentKind::semantic)
      lengths.semantic += s.length();
    else
      lengths.non_semantic += s.length();
  }
  return lengths;
}

}  // namespace sff
