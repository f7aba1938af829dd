#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "sff/semantic.hpp"
#include "sff/transition_graph.hpp"
#include "sff/warp.hpp"

namespace sff {

struct StabilizerConfig {
  int alpha = 32;          // patch length in output frames, power of 2
  double dp = 0.5;         // drop-area scale (fraction of each axis)
  double cp = 0.05;        // crop margin (fraction of each axis per side)
  double sigma_cov = 25.0; // replacement coverage Gaussian, percentage points
  double eta = 1.0;        // replacement zero-guard on the semantic factor
  int max_replacement_rounds = 3;
  // Warping or stitching by a homography supported by fewer agreeing
  // points than this treats the alignment as failed; 4-point consensus
  // sets on unrelated frames are routinely spurious.
  int min_anchor_inliers = 12;
  DetectorConfig detector;
  RansacConfig ransac;

  void validate() const;  // throws invalid_config

  Rect drop_rect(int width, int height) const;
  Rect crop_rect(int width, int height) const;
};

/// Consecutive output-slot ranges and the chosen master per patch.
struct PatchPlan {
  struct Patch {
    int begin = 0;  // slot range [begin, end)
    int end = 0;
  };
  std::vector<Patch> patches;
  std::vector<int> masters;  // one slot index per patch
};

std::vector<PatchPlan::Patch> partition_patches(int n_sampled, int alpha);

/// Master = argmax over candidate slots of the summed pairwise inlier
/// score against the whole patch; ties take the earliest slot.
/// `score(i, f)` returns R(frame at slot i, frame at slot f).
int select_master(const PatchPlan::Patch& patch, const std::function<int(int, int)>& score);

/// Principal fractional power exp(p log h) of a det-normalized homography.
/// Throws branch_failure when an eigenvalue lies on the closed negative
/// real axis (no principal logarithm).
Homography fractional_power(const Homography& h, double p);

/// Position of a frame inside its transition area: delta frames past the
/// previous master out of Delta between masters.
double transition_weight(int delta, int Delta);

/// Homography pair toward the enclosing masters plus the mixing weight.
struct WarpSpec {
  Homography h_pre;  // frame -> previous master
  Homography h_pos;  // frame -> posterior master
  double w = 0.0;
  int delta = 0;
  int Delta = 1;
};

/// Applies h_pre^(1-w) * h_pos^w with inverse-mapped bilinear resampling.
MaskedFrame smooth_frame(const Frame& frame, const WarpSpec& spec);

enum class OutcomeState { done, stitched, dropped };

struct FrameOutcome {
  int slot = 0;
  int source_frame = -1;          // original index of the frame actually used
  OutcomeState state = OutcomeState::dropped;
  std::vector<int> donors;        // original indices stitched in
  double crop_coverage = 0.0;
  double drop_coverage = 0.0;
  double w = 0.0;
};

struct StitchResult {
  bool aligned = false;  // false: RANSAC degenerate, base returned unchanged
};

/// Aligns the donor onto the warped base and copies donor pixels into
/// invalid base positions only. Valid base pixels are never overwritten.
/// Alignments with fewer than min_inliers agreeing points count as failed.
StitchResult stitch(MaskedFrame& base, const Frame& donor, const DetectorConfig& det,
                    const RansacConfig& ransac, int min_inliers = 4);

struct ReplacementContext {
  const Frame* prev = nullptr;  // warped previous output frame, if any
  const Frame* next = nullptr;  // warped posterior frame, if any
};

/// Eq-8-style replacement pick: coverage Gaussian x inlier agreement with
/// the surrounding outputs x (eta + semantic score). Ties take the
/// candidate closest to `replaced_index`. Throws no_candidates.
int select_replacement(const std::vector<int>& candidates, const FrameSequence& original,
                       const ReplacementContext& context, const SemanticProfile& profile,
                       int replaced_index, const StabilizerConfig& cfg);

struct StabilizeResult {
  FrameSequence stabilized;           // frames cropped to the crop rectangle
  std::vector<FrameOutcome> outcomes; // one per output slot
  PatchPlan plan;
  std::vector<int> collapsed_patches; // patches passed through unstabilized
};

/// Runs the full reconstruction state machine over the sampled sequence.
StabilizeResult stabilize(const FrameSequence& original, const SamplingResult& sampling,
                          const SemanticProfile& profile, const StabilizerConfig& cfg,
                          int jobs = 0);

void save_outcomes_jsonl(const StabilizeResult& result, const std::filesystem::path& path);

}  // namespace sff
