#pragma once

#include <vector>

#include "sff/frame.hpp"

namespace sff {

struct Keypoint {
  float x = 0;
  float y = 0;
  float response = 0;
};

/// Keypoints plus one fixed-length descriptor per keypoint (row-major).
struct FeatureSet {
  std::vector<Keypoint> keypoints;
  std::vector<float> descriptors;
  int descriptor_size = 64;

  int size() const { return static_cast<int>(keypoints.size()); }
  const float* descriptor(int i) const { return descriptors.data() + static_cast<std::size_t>(i) * descriptor_size; }
};

struct Match {
  int a = 0;
  int b = 0;
  float distance = 0;
};

struct MatchSet {
  std::vector<Match> pairs;

  int size() const { return static_cast<int>(pairs.size()); }
};

/// Harris corner detector with an 8x8 mean/L2-normalized intensity patch
/// descriptor. Deterministic; stands in for SURF/SIFT behind the same
/// matching and RANSAC path. Any detector producing FeatureSet plugs in.
struct DetectorConfig {
  int max_features = 400;
  double quality_level = 0.01;  // response threshold relative to the frame max
  double harris_k = 0.04;
  int border = 8;               // keypoints keep this margin so patches fit
};

FeatureSet detect_features(const Frame& frame, const DetectorConfig& cfg = {});

/// Exhaustive nearest-neighbor matching with mutual-best filtering; the
/// result is one-to-one. Distances are L2 over descriptors.
/// max_ratio > 0 additionally applies the classic distance-ratio test
/// (best / second-best < max_ratio) to discard ambiguous pairs.
MatchSet match_features(const FeatureSet& a, const FeatureSet& b, double max_ratio = 0.0);

}  // namespace sff
