#pragma once

#include <filesystem>
#include <vector>

#include "sff/roi_labels.hpp"

namespace sff {

/// Unnormalized isotropic Gaussian centered on the frame, peak value 1.
struct GaussianSpec {
  double sigma = 0.0;      // pixels, > 0
  double center_x = 0.0;   // frame center
  double center_y = 0.0;

  static GaussianSpec for_frame(int width, int height, double sigma = 0.0);
};

struct SemanticProfile {
  std::vector<double> scores;  // one value per frame, >= 0
  double sigma_used = 0.0;

  int size() const { return static_cast<int>(scores.size()); }
  double mean() const;
};

/// exp(-d^2 / (2 sigma^2)) with d the distance from (x, y) to the center.
double gaussian_weight(double x, double y, const GaussianSpec& spec);

/// Per-frame semantic score: sum over ROIs of confidence * area * centrality.
double frame_semantic_score(const std::vector<Roi>& rois, int width, int height,
                            const GaussianSpec& spec);

/// Element-wise frame_semantic_score over the label lists.
/// Throws length_mismatch when labels count differs from n_frames.
SemanticProfile score_series(const RoiLabels& labels, int n_frames, int width, int height,
                             const GaussianSpec& spec);

void save_profile_csv(const SemanticProfile& profile, const std::filesystem::path& path);
SemanticProfile load_profile_csv(const std::filesystem::path& path);

}  // namespace sff
