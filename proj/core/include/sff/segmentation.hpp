#pragma once

#include <vector>

#include "sff/semantic.hpp"

namespace sff {

enum class SegmentKind { semantic, non_semantic };

/// Inclusive frame range of one temporal class. speedup is 0 until a plan
/// has been assigned (see assign_segment_speedups).
struct Segment {
  int start = 0;
  int end = 0;
  SegmentKind kind = SegmentKind::non_semantic;
  int speedup = 0;

  int length() const { return end - start + 1; }
};

struct OtsuResult {
  double threshold = 0.0;
  bool degenerate = false;  // all scores identical; whole video is one class
  int split_bin = 0;
};

/// Threshold maximizing between-class variance over a `bin_count`-bin
/// histogram of the scores. The returned value is the lower edge of the
/// split bin mapped back to score units. Splits are compared in exact
/// integer arithmetic so the argmax is reproducible; a tied plateau
/// (empty bins between the classes) resolves to its mean split.
/// Throws invalid_argument on an empty profile or bin_count < 2.
OtsuResult otsu_threshold(const SemanticProfile& scores, int bin_count = 256);

/// Maximal runs with score > threshold become semantic segments, the rest
/// non-semantic. Runs shorter than min_len are merged into their
/// surroundings. Output tiles [0, N-1] with alternating kinds.
std::vector<Segment> segment_by_threshold(const SemanticProfile& scores, double threshold,
                                          int min_len = 1);

/// Total frame count per class over a segment list.
struct ClassLengths {
  long semantic = 0;
  long non_semantic = 0;
};
ClassLengths class_lengths(const std::vector<Segment>& segments);

}  // namespace sff
