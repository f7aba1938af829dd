// sff: semantic fast-forward and stabilization for egocentric video.
// Each subcommand runs one pipeline stage against plain file artifacts;
// `pipeline` chains them all.

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sff/image_io.hpp"
#include "sff/pipeline.hpp"
#include "sff/synthetic.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
  sff::PipelineConfig cfg;
  std::string config_file;
  std::vector<std::pair<CLI::Option*, std::function<void()>>> appliers;

  // Precedence is flags > config file > defaults: flag values land in
  // temporaries and only overwrite the config when actually passed.
  template <typename T>
  void bind(CLI::App* app, const std::string& flag, T* target, const std::string& help) {
    auto value = std::make_shared<T>(*target);
    CLI::Option* opt = app->add_option(flag, *value, help);
    appliers.emplace_back(opt, [value, target] { *target = *value; });
  }

  void add_common(CLI::App* app) {
    app->add_option("--config", config_file, "flat key=value config file");
    bind(app, "--speedup", &cfg.f_d, "desired speed-up F_d");
    bind(app, "--sigma", &cfg.sigma, "semantic Gaussian sigma (0 = min(W/2, H/2))");
    bind(app, "--bins", &cfg.score_bins, "Otsu histogram bins");
    bind(app, "--min-len", &cfg.min_segment_len, "minimum segment run length");
    bind(app, "--lambda1", &cfg.planner.lambda1, "rate-spread penalty");
    bind(app, "--lambda2", &cfg.planner.lambda2, "semantic-rate penalty");
    bind(app, "--f-max", &cfg.planner.f_max, "F_ns search ceiling (0 = 10*F_d)");
    bind(app, "--tau-max", &cfg.graph.tau_max, "maximum frame skip");
    bind(app, "--tau-b", &cfg.graph.tau_b, "source/sink border width");
    bind(app, "--epsilon", &cfg.graph.epsilon, "semantic cost stabilizer");
    bind(app, "--hist-bins", &cfg.histogram_bins, "appearance histogram bins");
    bind(app, "--target-flow", &cfg.target_flow, "desired flow magnitude (0 = auto)");
    bind(app, "--max-features", &cfg.detector.max_features, "detector keypoint cap");
    bind(app, "--ransac-threshold", &cfg.ransac_threshold, "inlier threshold in px");
    bind(app, "--ransac-iters", &cfg.ransac_iters, "RANSAC iteration cap");
    bind(app, "--alpha", &cfg.stabilizer.alpha, "stabilizer patch length (power of 2)");
    bind(app, "--dp", &cfg.stabilizer.dp, "drop-area scale");
    bind(app, "--cp", &cfg.stabilizer.cp, "crop margin scale");
    bind(app, "--sigma-cov", &cfg.stabilizer.sigma_cov, "replacement coverage sigma (pct)");
    bind(app, "--eta", &cfg.stabilizer.eta, "replacement zero-guard");
    bind(app, "--buffer", &cfg.buffer_size, "instability buffer N_B");
    bind(app, "--seed", &cfg.seed, "seed for all randomized steps");
    bind(app, "--jobs", &cfg.jobs, "worker threads (0 = hardware)");
    bind(app, "--format", &cfg.image_format, "written image format: png|pgm|ppm");

    auto lambdas = std::make_shared<std::vector<double>>();
    CLI::Option* opt = app->add_option("--lambdas", *lambdas, "edge weights i,v,a,s")
                           ->delimiter(',')
                           ->expected(4);
    appliers.emplace_back(opt, [lambdas, this] {
      cfg.graph.lambda_i = (*lambdas)[0];
      cfg.graph.lambda_v = (*lambdas)[1];
      cfg.graph.lambda_a = (*lambdas)[2];
      cfg.graph.lambda_s = (*lambdas)[3];
    });
  }

  void resolve() {
    if (!config_file.empty()) sff::apply_config_file(cfg, config_file);
    for (auto& [opt, apply] : appliers)
      if (opt->count() > 0) apply();
    cfg.validate();
  }
};

int dispatch(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const sff::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantic fast-forward and stabilization for egocentric video"};
  app.require_subcommand(1);
  CommonOpts opts;

  std::string frames_dir, labels_path, scores_path, segments_path, plan_path, selected_path,
      spec_path, out_dir, video_dir, csv_path;
  bool cost_cache = false;

  CLI::App* score = app.add_subcommand("score", "semantic score per frame");
  score->add_option("--frames", frames_dir, "frame directory")->required();
  score->add_option("--labels", labels_path, "ROI label JSONL")->required();
  score->add_option("--out", out_dir, "output directory")->required();
  opts.add_common(score);

  CLI::App* segment = app.add_subcommand("segment", "Otsu temporal segmentation");
  segment->add_option("--scores", scores_path, "scores.csv")->required();
  segment->add_option("--out", out_dir, "output directory")->required();
  opts.add_common(segment);

  CLI::App* plan = app.add_subcommand("plan", "per-class speed-up estimation");
  plan->add_option("--segments", segments_path, "segments.json")->required();
  plan->add_option("--out", out_dir, "output directory")->required();
  opts.add_common(plan);

  CLI::App* sample = app.add_subcommand("sample", "shortest-path frame sampling");
  sample->add_option("--frames", frames_dir, "frame directory")->required();
  sample->add_option("--scores", scores_path, "scores.csv")->required();
  sample->add_option("--plan", plan_path, "plan.json")->required();
  sample->add_option("--out", out_dir, "output directory")->required();
  sample->add_flag("--cost-cache", cost_cache, "reuse/write costs.bin in the output directory");
  opts.add_common(sample);

  CLI::App* stabilize = app.add_subcommand("stabilize", "stabilize the sampled video");
  stabilize->add_option("--frames", frames_dir, "original frame directory")->required();
  stabilize->add_option("--scores", scores_path, "scores.csv")->required();
  stabilize->add_option("--selected", selected_path, "selected.txt")->required();
  stabilize->add_option("--out", out_dir, "output directory")->required();
  opts.add_common(stabilize);

  CLI::App* evaluate = app.add_subcommand("evaluate", "speed-up, semantics and instability");
  evaluate->add_option("--frames", frames_dir, "original frame directory")->required();
  evaluate->add_option("--scores", scores_path, "scores.csv")->required();
  evaluate->add_option("--selected", selected_path, "selected.txt")->required();
  evaluate->add_option("--video", video_dir, "sequence to measure (default: sampled frames)");
  evaluate->add_option("--csv", csv_path, "append a metrics CSV row here");
  evaluate->add_option("--out", out_dir, "output directory")->required();
  opts.add_common(evaluate);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic labeled scene");
  synth->add_option("--spec", spec_path, "scene spec JSON")->required();
  synth->add_option("--out", out_dir, "output directory")->required();
  opts.add_common(synth);

  CLI::App* pipeline = app.add_subcommand("pipeline", "run every stage in order");
  pipeline->add_option("--frames", frames_dir, "frame directory")->required();
  pipeline->add_option("--labels", labels_path, "ROI label JSONL")->required();
  pipeline->add_option("--out", out_dir, "output directory")->required();
  pipeline->add_flag("--cost-cache", cost_cache, "reuse/write costs.bin in the output directory");
  opts.add_common(pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  int rc = dispatch([&] { opts.resolve(); });
  if (rc != 0) return rc;
  const sff::PipelineConfig& cfg = opts.cfg;

  if (score->parsed()) {
    return dispatch([&] {
      fs::create_directories(out_dir);
      sff::run_score_stage(frames_dir, labels_path, fs::path(out_dir) / "scores.csv", cfg);
    });
  }
  if (segment->parsed()) {
    return dispatch([&] {
      fs::create_directories(out_dir);
      sff::run_segment_stage(scores_path, fs::path(out_dir) / "segments.json", cfg);
    });
  }
  if (plan->parsed()) {
    return dispatch([&] {
      fs::create_directories(out_dir);
      sff::run_plan_stage(segments_path, fs::path(out_dir) / "plan.json", cfg);
    });
  }
  if (sample->parsed()) {
    return dispatch([&] {
      fs::create_directories(out_dir);
      fs::path out(out_dir);
      sff::run_sample_stage(frames_dir, scores_path, plan_path, out / "selected.txt",
                            out / "sampling.json",
                            cost_cache ? std::optional<fs::path>(out / "costs.bin") : std::nullopt,
                            cfg);
    });
  }
  if (stabilize->parsed()) {
    return dispatch([&] {
      fs::create_directories(out_dir);
      fs::path out(out_dir);
      sff::run_stabilize_stage(frames_dir, scores_path, selected_path, out / "stabilized",
                               out / "outcomes.jsonl", cfg);
    });
  }
  if (evaluate->parsed()) {
    return dispatch([&] {
      fs::create_directories(out_dir);
      sff::run_evaluate_stage(
          frames_dir, scores_path, selected_path,
          video_dir.empty() ? std::nullopt : std::optional<fs::path>(video_dir),
          fs::path(out_dir) / "metrics.json",
          csv_path.empty() ? std::nullopt : std::optional<fs::path>(csv_path), cfg);
    });
  }
  if (synth->parsed()) {
    return dispatch([&] {
      sff::SyntheticSceneSpec spec = sff::load_scene_spec_json(spec_path);
      if (synth->count("--seed") > 0) spec.seed = cfg.seed;
      sff::SyntheticScene scene = sff::generate_synthetic_scene(spec);
      fs::create_directories(out_dir);
      fs::path out(out_dir);
      sff::save_image_sequence(scene.frames, out, "frame", cfg.image_format);
      sff::save_roi_labels(scene.labels, out / "labels.jsonl");
      sff::save_ground_truth_json(scene, out / "ground_truth.json");
      sff::save_scene_spec_json(spec, out / "scene.json");
    });
  }
  if (pipeline->parsed()) {
    return dispatch([&] {
      sff::MetricsReport report =
          sff::run_pipeline(frames_dir, labels_path, out_dir, cfg, cost_cache);
      std::printf("achieved_speedup=%.6g semantic_content=%.6g instability=%.6g\n",
                  report.achieved_speedup, report.semantic_content, report.instability.index);
    });
  }
  return 1;
}
