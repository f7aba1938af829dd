#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sff/roi_labels.hpp"
#include "sff/segmentation.hpp"

namespace sff {

/// Deterministic test-scene generator: a procedural canvas viewed through
/// a moving window, with optional per-frame jitter and planted semantic
/// ROIs. Integer offsets with zero rotation are exact crops, so ground
/// truth is pixel-perfect.
struct SyntheticSceneSpec {
  int n_frames = 120;
  int width = 320;
  int height = 240;
  bool color = false;

  // smooth base motion: linear pan plus an optional sinusoidal sway
  double vx = 1.0;
  double vy = 0.0;
  double sway_amp_x = 0.0;
  double sway_amp_y = 0.0;
  double sway_period = 240.0;

  // per-frame random disturbance (uniform integer translations; rotation
  // in degrees resamples bilinearly when nonzero)
  double jitter_translation = 0.0;
  double jitter_rotation = 0.0;

  std::uint64_t seed = 17;

  struct SemanticBlock {
    int start = 0;
    int end = -1;  // inclusive
  };
  std::vector<SemanticBlock> semantic_blocks;
  int roi_w = 48;
  int roi_h = 48;

  std::string texture = "noise";  // noise | checker | stripes
  // slow palette drift along the canvas x-axis; this is what makes frame
  // appearance diverge with viewpoint distance
  double palette_amp = 40.0;
  double palette_period = 2000.0;
};

struct SyntheticScene {
  FrameSequence frames;
  RoiLabels labels;
  std::vector<Segment> true_segments;            // planted semantic map (speedup 0)
  std::vector<Eigen::Vector2d> offsets;          // canvas offset of each frame window
  std::vector<Eigen::Matrix3d> gt_homographies;  // frame k -> frame 0
};

SyntheticScene generate_synthetic_scene(const SyntheticSceneSpec& spec);

void save_scene_spec_json(const SyntheticSceneSpec& spec, const std::filesystem::path& path);
SyntheticSceneSpec load_scene_spec_json(const std::filesystem::path& path);
void save_ground_truth_json(const SyntheticScene& scene, const std::filesystem::path& path);

}  // namespace sff
