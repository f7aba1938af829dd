#include <doctest.h>

#include "sff/metrics.hpp"
#include "sff/synthetic.hpp"
#include "test_util.hpp"

using namespace sff;

TEST_CASE("zero jitter and zero motion produce identical frames") {
  SyntheticSceneSpec spec;
  spec.n_frames = 6;
  spec.width = 64;
  spec.height = 48;
  spec.vx = 0;
  spec.vy = 0;
  SyntheticScene scene = generate_synthetic_scene(spec);
  REQUIRE(scene.frames.size() == 6);
  for (int i = 1; i < 6; ++i) CHECK(scene.frames[i].gray == scene.frames[0].gray);
}

TEST_CASE("generator is deterministic under its seed") {
  SyntheticSceneSpec spec;
  spec.n_frames = 8;
  spec.width = 80;
  spec.height = 60;
  spec.jitter_translation = 4;
  spec.seed = 99;
  SyntheticScene a = generate_synthetic_scene(spec);
  SyntheticScene b = generate_synthetic_scene(spec);
  for (int i = 0; i < 8; ++i) {
    CHECK(a.frames[i].gray == b.frames[i].gray);
    CHECK(a.offsets[i] == b.offsets[i]);
  }
  spec.seed = 100;
  SyntheticScene c = generate_synthetic_scene(spec);
  bool any_diff = false;
  for (int i = 0; i < 8 && !any_diff; ++i) any_diff = c.frames[i].gray != a.frames[i].gray;
  CHECK(any_diff);
}

TEST_CASE("jitter strictly raises the instability index") {
  SyntheticSceneSpec spec;
  spec.n_frames = 24;
  spec.width = 96;
  spec.height = 72;
  spec.vx = 0;
  SyntheticScene calm = generate_synthetic_scene(spec);
  spec.jitter_translation = 6;
  SyntheticScene shaky = generate_synthetic_scene(spec);
  double calm_index = instability_index(calm.frames, 5).index;
  double shaky_index = instability_index(shaky.frames, 5).index;
  CHECK(calm_index == doctest::Approx(0.0));
  CHECK(shaky_index > calm_index);
}

TEST_CASE("semantic blocks come back as labels and the true segment map") {
  SyntheticSceneSpec spec;
  spec.n_frames = 40;
  spec.width = 96;
  spec.height = 72;
  spec.semantic_blocks = {{10, 19}};  // exactly 25 percent
  SyntheticScene scene = generate_synthetic_scene(spec);

  int labeled = 0;
  for (int i = 0; i < 40; ++i) {
    if (i >= 10 && i <= 19) {
      REQUIRE(scene.labels[i].size() == 1);
      CHECK(scene.labels[i][0].confidence == 1.0);
      ++labeled;
    } else {
      CHECK(scene.labels[i].empty());
    }
  }
  CHECK(labeled == 10);

  REQUIRE(scene.true_segments.size() == 3);
  CHECK(scene.true_segments[0].kind == SegmentKind::non_semantic);
  CHECK(scene.true_segments[1].kind == SegmentKind::semantic);
  CHECK(scene.true_segments[1].start == 10);
  CHECK(scene.true_segments[1].end == 19);
  CHECK(scene.true_segments[2].end == 39);
}

TEST_CASE("pan offsets land in the ground truth") {
  SyntheticSceneSpec spec;
  spec.n_frames = 10;
  spec.width = 64;
  spec.height = 48;
  spec.vx = 3;
  SyntheticScene scene = generate_synthetic_scene(spec);
  for (int i = 0; i < 10; ++i) CHECK(scene.offsets[i].x() == doctest::Approx(3.0 * i));
  // frames are exact crops: pixel content shifts with the offset
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 61; ++x)
      CHECK(scene.frames[1].at(x, y) == scene.frames[0].at(x + 3, y));
  // ground-truth homography frame1 -> frame0 is the translation by +3
  CHECK(scene.gt_homographies[1](0, 2) == doctest::Approx(3.0));
  CHECK(scene.gt_homographies[1](1, 2) == doctest::Approx(0.0));
}

TEST_CASE("scene spec json round trip") {
  sfftest::TempDir dir("scene_spec");
  SyntheticSceneSpec spec;
  spec.n_frames = 123;
  spec.jitter_translation = 5;
  spec.semantic_blocks = {{5, 9}, {20, 39}};
  spec.texture = "checker";
  save_scene_spec_json(spec, dir.path() / "scene.json");
  SyntheticSceneSpec back = load_scene_spec_json(dir.path() / "scene.json");
  CHECK(back.n_frames == 123);
  CHECK(back.jitter_translation == 5);
  REQUIRE(back.semantic_blocks.size() == 2);
  CHECK(back.semantic_blocks[1].start == 20);
  CHECK(back.texture == "checker");
}
