#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "sff/image_io.hpp"
#include "sff/pipeline.hpp"
#include "sff/synthetic.hpp"
#include "test_util.hpp"

using namespace sff;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(SFF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

void check_same_file(const fs::path& a, const fs::path& b) {
  CHECK(slurp(a) == slurp(b));
}

void write_scene(const fs::path& dir) {
  SyntheticSceneSpec spec;
  spec.n_frames = 60;
  spec.width = 128;
  spec.height = 96;
  spec.vx = 1.0;
  spec.jitter_translation = 2;
  spec.semantic_blocks = {{20, 39}};
  spec.roi_w = 28;
  spec.roi_h = 28;
  spec.seed = 41;
  SyntheticScene scene = generate_synthetic_scene(spec);
  // write through the CLI-visible artifact formats
  save_image_sequence(scene.frames, dir, "frame", "pgm");
  save_roi_labels(scene.labels, dir / "labels.jsonl");
}

std::string common_flags() {
  return " --speedup 5 --tau-max 12 --tau-b 3 --alpha 8 --format pgm --jobs 2 --seed 17";
}

}  // namespace

TEST_CASE("config file keys apply with flag precedence") {
  sfftest::TempDir dir("cli_config");
  {
    std::ofstream out(dir.path() / "sff.conf");
    out << "# comment line\n";
    out << "speedup = 7\n";
    out << "tau_max = 33\n";
    out << "lambda_s = 2.5\n";
  }
  PipelineConfig cfg;
  apply_config_file(cfg, dir.path() / "sff.conf");
  CHECK(cfg.f_d == 7);
  CHECK(cfg.graph.tau_max == 33);
  CHECK(cfg.graph.lambda_s == 2.5);

  std::ofstream(dir.path() / "bad.conf") << "no_such_key = 1\n";
  try {
    apply_config_file(cfg, dir.path() / "bad.conf");
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
  }
}

TEST_CASE("cli maps usage and data problems to distinct exit codes") {
  sfftest::TempDir dir("cli_codes");
  CHECK(run_cli("--definitely-not-a-flag") == 1);
  CHECK(run_cli("synth") == 1);  // missing required options
  CHECK(run_cli("segment --scores " + (dir.path() / "missing.csv").string() + " --out " +
                dir.path().string()) == 2);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("pipeline output is byte-identical to running the stages by hand") {
  sfftest::TempDir dir("cli_stage_isolation");
  fs::path scene = dir.path() / "scene";
  fs::create_directories(scene);
  write_scene(scene);

  fs::path run_a = dir.path() / "pipeline_run";
  std::string base = " --frames " + scene.string() + " --labels " +
                     (scene / "labels.jsonl").string() + common_flags();
  REQUIRE(run_cli("pipeline" + base + " --out " + run_a.string()) == 0);

  fs::path run_b = dir.path() / "manual_run";
  fs::create_directories(run_b);
  std::string out = " --out " + run_b.string();
  std::string scores = " --scores " + (run_b / "scores.csv").string();
  REQUIRE(run_cli("score --frames " + scene.string() + " --labels " +
                  (scene / "labels.jsonl").string() + common_flags() + out) == 0);
  REQUIRE(run_cli("segment" + scores + common_flags() + out) == 0);
  REQUIRE(run_cli("plan --segments " + (run_b / "segments.json").string() + common_flags() +
                  out) == 0);
  REQUIRE(run_cli("sample --frames " + scene.string() + scores + " --plan " +
                  (run_b / "plan.json").string() + common_flags() + out) == 0);
  REQUIRE(run_cli("stabilize --frames " + scene.string() + scores + " --selected " +
                  (run_b / "selected.txt").string() + common_flags() + out) == 0);
  REQUIRE(run_cli("evaluate --frames " + scene.string() + scores + " --selected " +
                  (run_b / "selected.txt").string() + " --video " +
                  (run_b / "stabilized").string() + common_flags() + out) == 0);

  for (const char* name : {"scores.csv", "segments.json", "plan.json", "selected.txt",
                           "sampling.json", "outcomes.jsonl", "metrics.json"})
    check_same_file(run_a / name, run_b / name);

  auto frames_a = fs::directory_iterator(run_a / "stabilized");
  std::size_t count_a = 0;
  for (const auto& entry : frames_a) {
    check_same_file(entry.path(), run_b / "stabilized" / entry.path().filename());
    ++count_a;
  }
  CHECK(count_a > 0);
}

TEST_CASE("synth writes the documented artifact set") {
  sfftest::TempDir dir("cli_synth");
  {
    std::ofstream out(dir.path() / "spec.json");
    out << R"({"n_frames": 8, "width": 64, "height": 48, "semantic_blocks": [{"start":2,"end":5}]})";
  }
  fs::path scene = dir.path() / "scene";
  REQUIRE(run_cli("synth --spec " + (dir.path() / "spec.json").string() + " --out " +
                  scene.string() + " --format pgm") == 0);
  CHECK(fs::exists(scene / "frame_000000.pgm"));
  CHECK(fs::exists(scene / "frame_000007.pgm"));
  CHECK(fs::exists(scene / "labels.jsonl"));
  CHECK(fs::exists(scene / "ground_truth.json"));
  CHECK(fs::exists(scene / "scene.json"));
  FrameSequence seq = load_image_sequence(scene);
  CHECK(seq.size() == 8);
}

TEST_CASE("cost cache round trips through the sample stage") {
  sfftest::TempDir dir("cli_cost_cache");
  fs::path scene = dir.path() / "scene";
  fs::create_directories(scene);
  write_scene(scene);

  fs::path run_a = dir.path() / "with_cache";
  fs::path run_b = dir.path() / "reuse_cache";
  std::string base = " --frames " + scene.string() + " --labels " +
                     (scene / "labels.jsonl").string() + common_flags();
  REQUIRE(run_cli("pipeline" + base + " --cost-cache --out " + run_a.string()) == 0);
  CHECK(fs::exists(run_a / "costs.bin"));

  // second run consumes the cache and must reproduce the selection
  fs::create_directories(run_b);
  fs::copy_file(run_a / "costs.bin", run_b / "costs.bin");
  REQUIRE(run_cli("pipeline" + base + " --cost-cache --out " + run_b.string()) == 0);
  check_same_file(run_a / "selected.txt", run_b / "selected.txt");
  check_same_file(run_a / "metrics.json", run_b / "metrics.json");
}
