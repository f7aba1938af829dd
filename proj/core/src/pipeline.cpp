#include "sff/pipeline.hpp"

#include <fstream>
#include <iostream>

#include "sff/image_io.hpp"

namespace sff {
namespace fs = std::filesystem;

CostTableConfig PipelineConfig::cost_config() const {
  CostTableConfig c;
  c.tau_max = graph.tau_max;
  c.histogram_bins = histogram_bins;
  c.target_flow = target_flow;
  c.detector = detector;
  c.jobs = jobs;
  return c;
}

StabilizerConfig PipelineConfig::stabilizer_config() const {
  StabilizerConfig c = stabilizer;
  c.detector = detector;
  c.ransac = ransac();
  return c;
}

void PipelineConfig::validate() const {
  if (f_d < 1) throw Error(Errc::invalid_config, "speedup must be >= 1");
  if (score_bins < 2) throw Error(Errc::invalid_config, "score_bins must be >= 2");
  if (histogram_bins < 2) throw Error(Errc::invalid_config, "histogram_bins must be >= 2");
  if (buffer_size < 2) throw Error(Errc::invalid_config, "buffer must be >= 2");
  if (min_segment_len < 1) throw Error(Errc::invalid_config, "min_segment_len must be >= 1");
  if (image_format != "png" && image_format != "pgm" && image_format != "ppm")
    throw Error(Errc::invalid_config, "image_format must be png, pgm or ppm");
  graph.validate();
  stabilizer_config().validate();
}

void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw Error(Errc::invalid_config,
                  path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      std::size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "speedup") cfg.f_d = std::stoi(value);
      else if (key == "sigma") cfg.sigma = std::stod(value);
      else if (key == "score_bins") cfg.score_bins = std::stoi(value);
      else if (key == "min_segment_len") cfg.min_segment_len = std::stoi(value);
      else if (key == "lambda1") cfg.planner.lambda1 = std::stod(value);
      else if (key == "lambda2") cfg.planner.lambda2 = std::stod(value);
      else if (key == "f_max") cfg.planner.f_max = std::stoi(value);
      else if (key == "tau_max") cfg.graph.tau_max = std::stoi(value);
      else if (key == "tau_b") cfg.graph.tau_b = std::stoi(value);
      else if (key == "lambda_i") cfg.graph.lambda_i = std::stod(value);
      else if (key == "lambda_v") cfg.graph.lambda_v = std::stod(value);
      else if (key == "lambda_a") cfg.graph.lambda_a = std::stod(value);
      else if (key == "lambda_s") cfg.graph.lambda_s = std::stod(value);
      else if (key == "epsilon") cfg.graph.epsilon = std::stod(value);
      else if (key == "histogram_bins") cfg.histogram_bins = std::stoi(value);
      else if (key == "target_flow") cfg.target_flow = std::stod(value);
      else if (key == "max_features") cfg.detector.max_features = std::stoi(value);
      else if (key == "quality_level") cfg.detector.quality_level = std::stod(value);
      else if (key == "ransac_threshold") cfg.ransac_threshold = std::stod(value);
      else if (key == "ransac_iters") cfg.ransac_iters = std::stoi(value);
      else if (key == "alpha") cfg.stabilizer.alpha = std::stoi(value);
      else if (key == "dp") cfg.stabilizer.dp = std::stod(value);
      else if (key == "cp") cfg.stabilizer.cp = std::stod(value);
      else if (key == "sigma_cov") cfg.stabilizer.sigma_cov = std::stod(value);
      else if (key == "eta") cfg.stabilizer.eta = std::stod(value);
      else if (key == "max_replacement_rounds") cfg.stabilizer.max_replacement_rounds = std::stoi(value);
      else if (key == "min_anchor_inliers") cfg.stabilizer.min_anchor_inliers = std::stoi(value);
      else if (key == "buffer") cfg.buffer_size = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "jobs") cfg.jobs = std::stoi(value);
      else if (key == "image_format") cfg.image_format = value;
      else
        throw Error(Errc::invalid_config,
                    path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(Errc::invalid_config,
                  path.string() + ":" + std::to_string(line_no) + ": bad value for '" + key + "'");
    }
  }
}

SemanticProfile run_score_stage(const fs::path& frames_dir, const fs::path& labels_path,
                                const fs::path& out_csv, const PipelineConfig& cfg) {
  FrameSequence seq = load_image_sequence(frames_dir);
  RoiLabels labels = load_roi_labels(labels_path, seq.size());
  validate_labels(labels, seq.width(), seq.height());
  GaussianSpec spec = GaussianSpec::for_frame(seq.width(), seq.height(), cfg.sigma);
  SemanticProfile profile = score_series(labels, seq.size(), seq.width(), seq.height(), spec);
  save_profile_csv(profile, out_csv);
  return profile;
}

LoadedSegments run_segment_stage(const fs::path& scores_csv, const fs::path& out_json,
                                 const PipelineConfig& cfg) {
  SemanticProfile profile = load_profile_csv(scores_csv);
  OtsuResult otsu = otsu_threshold(profile, cfg.score_bins);
  std::vector<Segment> segments =
      segment_by_threshold(profile, otsu.threshold, cfg.min_segment_len);
  save_segments_json(segments, otsu, out_json);
  return LoadedSegments{segments, otsu};
}

LoadedPlan run_plan_stage(const fs::path& segments_json, const fs::path& out_json,
                          const PipelineConfig& cfg) {
  LoadedSegments loaded = load_segments_json(segments_json);
  ClassLengths lengths = class_lengths(loaded.segments);
  SpeedupPlan plan =
      estimate_speedups(lengths.semantic, lengths.non_semantic, cfg.f_d, cfg.planner);
  std::vector<Segment> segments = assign_segment_speedups(loaded.segments, plan);
  save_plan_json(plan, segments, out_json);
  return LoadedPlan{plan, segments};
}

SamplingResult run_sample_stage(const fs::path& frames_dir, const fs::path& scores_csv,
                                const fs::path& plan_json, const fs::path& out_selected,
                                const fs::path& out_json,
                                const std::optional<fs::path>& cost_cache,
                                const PipelineConfig& cfg) {
  FrameSequence seq = load_image_sequence(frames_dir);
  SemanticProfile profile = load_profile_csv(scores_csv);
  LoadedPlan plan = load_plan_json(plan_json);

  CostTable table;
  if (cost_cache && fs::exists(*cost_cache)) {
    table = CostTable::load(*cost_cache);
    if (table.n_frames() != seq.size() || table.tau_max() != cfg.graph.tau_max)
      throw Error(Errc::invalid_config, "cost cache does not match the sequence");
  } else {
    CostTableConfig cc = cfg.cost_config();
    table = compute_cost_table(seq, cc).table;
    if (cost_cache) table.save(*cost_cache);
  }

  SamplingResult result = sample_video(seq.size(), plan.segments, profile, table.fn(),
                                       cfg.graph, cfg.jobs);
  save_selected(result, out_selected);
  save_sampling_json(result, out_json);
  return result;
}

StabilizeResult run_stabilize_stage(const fs::path& frames_dir, const fs::path& scores_csv,
                                    const fs::path& selected_path, const fs::path& out_dir,
                                    const fs::path& out_log, const PipelineConfig& cfg) {
  FrameSequence seq = load_image_sequence(frames_dir);
  SemanticProfile profile = load_profile_csv(scores_csv);
  SamplingResult sampling;
  sampling.selected = load_selected(selected_path);
  if (sampling.selected.empty()) throw Error(Errc::empty_sequence, "no selected frames");
  sampling.achieved_speedup =
      static_cast<double>(seq.size()) / static_cast<double>(sampling.selected.size());

  StabilizeResult result = stabilize(seq, sampling, profile, cfg.stabilizer_config(), cfg.jobs);
  for (int patch : result.collapsed_patches)
    std::cerr << "warning: stabilization collapsed in patch " << patch
              << "; passing it through unstabilized\n";
  save_image_sequence(result.stabilized, out_dir, "stabilized", cfg.image_format);
  save_outcomes_jsonl(result, out_log);
  return result;
}

MetricsReport run_evaluate_stage(const fs::path& frames_dir, const fs::path& scores_csv,
                                 const fs::path& selected_path,
                                 const std::optional<fs::path>& video_dir,
                                 const fs::path& out_json, const std::optional<fs::path>& out_csv,
                                 const PipelineConfig& cfg) {
  FrameSequence seq = load_image_sequence(frames_dir);
  SemanticProfile profile = load_profile_csv(scores_csv);
  std::vector<int> selected = load_selected(selected_path);

  MetricsReport report;
  report.achieved_speedup = achieved_speedup(seq.size(), static_cast<long>(selected.size()));
  report.semantic_content = semantic_content(selected, profile);

  FrameSequence measured;
  if (video_dir) {
    measured = load_image_sequence(*video_dir);
  } else {
    for (int idx : selected) {
      if (idx < 0 || idx >= seq.size())
        throw Error(Errc::out_of_range_frame, "selected index outside the sequence");
      Frame f = seq[idx];
      f.index = static_cast<int>(measured.frames.size());
      measured.frames.push_back(std::move(f));
    }
  }
  report.instability = instability_index(measured, cfg.buffer_size);

  save_metrics_json(report, out_json);
  if (out_csv) save_metrics_csv(report, frames_dir.filename().string(), *out_csv);
  return report;
}

PipelineArtifacts pipeline_artifact_paths(const fs::path& out_dir, bool with_cost_cache) {
  PipelineArtifacts a;
  a.scores_csv = out_dir / "scores.csv";
  a.segments_json = out_dir / "segments.json";
  a.plan_json = out_dir / "plan.json";
  a.selected_txt = out_dir / "selected.txt";
  a.sampling_json = out_dir / "sampling.json";
  a.stabilized_dir = out_dir / "stabilized";
  a.outcomes_jsonl = out_dir / "outcomes.jsonl";
  a.metrics_json = out_dir / "metrics.json";
  if (with_cost_cache) a.cost_cache = out_dir / "costs.bin";
  return a;
}

MetricsReport run_pipeline(const fs::path& frames_dir, const fs::path& labels_path,
                           const fs::path& out_dir, const PipelineConfig& cfg,
                           bool with_cost_cache) {
  cfg.validate();
  fs::create_directories(out_dir);
  PipelineArtifacts a = pipeline_artifact_paths(out_dir, with_cost_cache);

  run_score_stage(frames_dir, labels_path, a.scores_csv, cfg);
  run_segment_stage(a.scores_csv, a.segments_json, cfg);
  run_plan_stage(a.segments_json, a.plan_json, cfg);
  run_sample_stage(frames_dir, a.scores_csv, a.plan_json, a.selected_txt, a.sampling_json,
                   with_cost_cache ? std::optional<fs::path>(a.cost_cache) : std::nullopt, cfg);
  run_stabilize_stage(frames_dir, a.scores_csv, a.selected_txt, a.stabilized_dir,
                      a.outcomes_jsonl, cfg);
  return run_evaluate_stage(frames_dir, a.scores_csv, a.selected_txt, a.stabilized_dir,
                            a.metrics_json, std::nullopt, cfg);
}

}  // namespace sff
