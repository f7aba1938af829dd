#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "sff/cost_table.hpp"
#include "sff/metrics.hpp"
#include "sff/semantic.hpp"
#include "sff/speedup.hpp"
#include "sff/stabilizer.hpp"
#include "sff/transition_graph.hpp"

namespace sff {

/// Every stage knob in one place. Flag/file precedence is handled by the
/// CLI; stages only ever see the resolved struct.
struct PipelineConfig {
  int f_d = 10;
  double sigma = 0.0;    // semantic Gaussian; 0 = min(W/2, H/2)
  int score_bins = 256;  // Otsu histogram bins
  int min_segment_len = 1;
  PlannerConfig planner;
  GraphConfig graph;
  int histogram_bins = 32;
  double target_flow = 0.0;  // 0 = global mean adjacent flow
  DetectorConfig detector{.max_features = 200};
  double ransac_threshold = 3.0;
  int ransac_iters = 2000;
  StabilizerConfig stabilizer;
  int buffer_size = 5;  // instability N_B
  std::uint64_t seed = 17;
  int jobs = 0;
  std::string image_format = "png";  // for written sequences

  RansacConfig ransac() const {
    return RansacConfig{ransac_threshold, ransac_iters, seed, 0.995};
  }
  CostTableConfig cost_config() const;
  StabilizerConfig stabilizer_config() const;

  void validate() const;
};

/// Flat key=value file, '#' comments. Unknown keys throw invalid_config.
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

// Stage entry points. Each reads its inputs from disk and writes its
// artifact files, so chaining them is identical to running the
// subcommands by hand.
SemanticProfile run_score_stage(const std::filesystem::path& frames_dir,
                                const std::filesystem::path& labels_path,
                                const std::filesystem::path& out_csv, const PipelineConfig& cfg);

LoadedSegments run_segment_stage(const std::filesystem::path& scores_csv,
                                 const std::filesystem::path& out_json,
                                 const PipelineConfig& cfg);

LoadedPlan run_plan_stage(const std::filesystem::path& segments_json,
                          const std::filesystem::path& out_json, const PipelineConfig& cfg);

SamplingResult run_sample_stage(const std::filesystem::path& frames_dir,
                                const std::filesystem::path& scores_csv,
                                const std::filesystem::path& plan_json,
                                const std::filesystem::path& out_selected,
                                const std::filesystem::path& out_json,
                                const std::optional<std::filesystem::path>& cost_cache,
                                const PipelineConfig& cfg);

StabilizeResult run_stabilize_stage(const std::filesystem::path& frames_dir,
                                    const std::filesystem::path& scores_csv,
                                    const std::filesystem::path& selected_path,
                                    const std::filesystem::path& out_dir,
                                    const std::filesystem::path& out_log,
                                    const PipelineConfig& cfg);

MetricsReport run_evaluate_stage(const std::filesystem::path& frames_dir,
                                 const std::filesystem::path& scores_csv,
                                 const std::filesystem::path& selected_path,
                                 const std::optional<std::filesystem::path>& video_dir,
                                 const std::filesystem::path& out_json,
                                 const std::optional<std::filesystem::path>& out_csv,
                                 const PipelineConfig& cfg);

struct PipelineArtifacts {
  std::filesystem::path scores_csv;
  std::filesystem::path segments_json;
  std::filesystem::path plan_json;
  std::filesystem::path selected_txt;
  std::filesystem::path sampling_json;
  std::filesystem::path stabilized_dir;
  std::filesystem::path outcomes_jsonl;
  std::filesystem::path metrics_json;
  std::filesystem::path cost_cache;  // empty if caching disabled
};

PipelineArtifacts pipeline_artifact_paths(const std::filesystem::path& out_dir,
                                          bool with_cost_cache);

/// Chains every stage through its on-disk artifacts.
MetricsReport run_pipeline(const std::filesystem::path& frames_dir,
                           const std::filesystem::path& labels_path,
                           const std::filesystem::path& out_dir, const PipelineConfig& cfg,
                           bool with_cost_cache = false);

}  // namespace sff
