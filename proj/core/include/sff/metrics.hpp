#pragma once

#include <filesystem>
#include <optional>

#include "sff/frame.hpp"
#include "sff/semantic.hpp"

namespace sff {

struct InstabilityReport {
  double index = 0.0;   // mean per-pixel temporal variance, intensity^2
  int buffer_size = 0;  // N_B
  int n_frames = 0;
};

/// Sliding-window temporal variance of the gray plane: for each window of
/// buffer_size frames, the per-pixel sample variance (denominator N_B - 1)
/// averaged over pixels; the index is the mean over all N - N_B + 1
/// windows. Throws too_short when N < buffer_size or buffer_size < 2.
InstabilityReport instability_index(const FrameSequence& seq, int buffer_size = 5);

/// Sum of the profile over the selected frames. Throws out_of_range_frame.
double semantic_content(const std::vector<int>& selected, const SemanticProfile& profile);

/// n_in / n_out. Throws empty_output when n_out < 1.
double achieved_speedup(long n_in, long n_out);

struct MetricsReport {
  double achieved_speedup = 0.0;
  double semantic_content = 0.0;
  InstabilityReport instability;
};

void save_metrics_json(const MetricsReport& report, const std::filesystem::path& path);
void save_metrics_csv(const MetricsReport& report, const std::string& name,
                      const std::filesystem::path& path);

}  // namespace sff
