#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sff/features.hpp"
#include "sff/frame.hpp"

namespace sff {

struct FlowVector {
  Eigen::Vector2d point;
  Eigen::Vector2d displacement;
};

struct FoeEstimate {
  Eigen::Vector2d point = Eigen::Vector2d::Zero();  // may lie outside the frame
  double residual = 0.0;  // mean perpendicular distance of the flow lines
};

struct FoeConfig {
  double condition_bound = 1e8;
  double min_displacement = 1e-9;  // vectors shorter than this are ignored
  // A coherent radial field leaves a small mean perpendicular residual;
  // above this bound the "FOE" is a fit to incoherent flow and the
  // instability cost treats the transition as degenerate.
  double residual_bound = 8.0;
};

/// Point minimizing the summed squared perpendicular distance to the lines
/// through each flow point along its displacement. Throws ill_conditioned
/// for (near-)parallel fields and invalid_argument for < 2 usable vectors.
FoeEstimate estimate_foe(const std::vector<FlowVector>& flow, const FoeConfig& cfg = {});

struct MotionConfig {
  DetectorConfig detector;
  FoeConfig foe;
  // fewer confident flow vectors than this makes the FOE meaningless
  int min_flow_matches = 8;
};

/// Instability cost term of a frame transition: distance of the FOE of the
/// matched-feature flow to the frame center, normalized by the
/// half-diagonal and clamped to [0,1]. Degenerate pairs cost 1 -
/// featureless, (near-)parallel, or incoherent (residual above the bound).
double instability_cost(const Frame& a, const Frame& b, const MotionConfig& cfg = {});
double instability_cost_from_flow(const std::vector<FlowVector>& flow, int width, int height,
                                  const FoeConfig& cfg = {});

/// Velocity cost term: |target - mean(mags)| / target, clamped to [0,1].
/// Throws zero_target.
double velocity_cost(const std::vector<double>& adjacent_magnitudes, double target_magnitude);
double velocity_cost_from_mean(double mean_magnitude, double target_magnitude);

struct FlowMagnitudes {
  std::vector<double> values;          // one per adjacent pair, length N-1
  std::vector<std::uint8_t> imputed;   // 1 where no matches existed and the running median filled in
};

/// Mean matched-feature displacement length per adjacent pair. Pairs with
/// no matches receive the running median of the preceding measured values
/// (or the overall median when nothing precedes) and are flagged.
FlowMagnitudes flow_magnitudes(const FrameSequence& seq, const DetectorConfig& cfg = {},
                               int jobs = 0);

/// The imputation rule of flow_magnitudes on already-measured values;
/// entries without a value get the running median and a flag.
FlowMagnitudes impute_flow_magnitudes(const std::vector<std::optional<double>>& raw);

/// Matched-feature displacements from frame a to frame b.
std::vector<FlowVector> sparse_flow(const FeatureSet& fa, const FeatureSet& fb);

}  // namespace sff
