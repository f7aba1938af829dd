#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "sff/flow.hpp"
#include "sff/frame.hpp"
#include "sff/homography.hpp"

namespace sff {

/// The three pairwise Eq-style cost terms of a frame transition. The
/// semantic term is derived from the profile at graph-build time, not here.
struct PairCosts {
  double instability = 0.0;
  double velocity = 0.0;
  double appearance = 0.0;
};

using CostFn = std::function<PairCosts(int i, int j)>;

struct CostTableConfig {
  int tau_max = 100;
  int histogram_bins = 32;
  double target_flow = 0.0;  // 0 = use the global mean adjacent-flow magnitude
  DetectorConfig detector;
  FoeConfig foe;
  int min_flow_matches = 8;  // instability term floor, see MotionConfig
  int jobs = 0;
};

/// Dense (i, i+k) cost buffer, k in [1, tau_max]. Filled once, then shared
/// by every per-segment graph; feature matching dominates the pipeline
/// cost so this is also what the on-disk cache stores.
class CostTable {
 public:
  CostTable() = default;
  CostTable(int n_frames, int tau_max);

  int n_frames() const { return n_; }
  int tau_max() const { return tau_; }
  bool valid_pair(int i, int j) const { return i >= 0 && i < j && j < n_ && j - i <= tau_; }

  PairCosts at(int i, int j) const;
  void set(int i, int j, const PairCosts& c);

  CostFn fn() const;

  /// Binary cache: uint32 N, uint32 tau_max, then row-major float32
  /// (I, V, A) triples for each valid (i, i+k).
  void save(const std::filesystem::path& path) const;
  static CostTable load(const std::filesystem::path& path);

 private:
  int n_ = 0;
  int tau_ = 0;
  std::vector<float> data_;  // 3 floats per slot

  std::size_t slot(int i, int j) const;
};

struct CostTableResult {
  CostTable table;
  FlowMagnitudes flow;
  double target_flow = 0.0;  // resolved value actually used
};

/// Computes every pairwise cost term for the sequence.
CostTableResult compute_cost_table(const FrameSequence& seq, const CostTableConfig& cfg);

}  // namespace sff
