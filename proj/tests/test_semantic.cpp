#include <doctest.h>

#include <cmath>

#include "sff/semantic.hpp"
#include "test_util.hpp"

using namespace sff;

TEST_CASE("gaussian weight peaks at the center and decays by definition") {
  GaussianSpec spec = GaussianSpec::for_frame(200, 100);
  CHECK(spec.sigma == doctest::Approx(50.0));  // min(W/2, H/2)
  CHECK(gaussian_weight(100, 50, spec) == doctest::Approx(1.0));
  CHECK(gaussian_weight(100 + spec.sigma, 50, spec) == doctest::Approx(std::exp(-0.5)));
  CHECK(gaussian_weight(100, 50 - 2 * spec.sigma, spec) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("frame score follows confidence * area * centrality") {
  GaussianSpec spec = GaussianSpec::for_frame(100, 100);
  SUBCASE("empty list scores zero") {
    CHECK(frame_semantic_score({}, 100, 100, spec) == 0.0);
  }
  SUBCASE("centered unit-confidence roi scores its area") {
    Roi r{45, 45, 10, 10, 1.0};  // centroid (50, 50) = frame center
    CHECK(frame_semantic_score({r}, 100, 100, spec) == doctest::Approx(100.0));
  }
  SUBCASE("two rois add") {
    Roi a{45, 45, 10, 10, 1.0};
    Roi b{10, 20, 8, 4, 0.5};
    double sa = frame_semantic_score({a}, 100, 100, spec);
    double sb = frame_semantic_score({b}, 100, 100, spec);
    CHECK(frame_semantic_score({a, b}, 100, 100, spec) == doctest::Approx(sa + sb));
  }
}

TEST_CASE("score properties: area, centrality and confidence monotonicity") {
  GaussianSpec spec = GaussianSpec::for_frame(200, 200);
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    int w = 4 + static_cast<int>(sfftest::uniform01(rng) * 30);
    int h = 4 + static_cast<int>(sfftest::uniform01(rng) * 30);
    int x = static_cast<int>(sfftest::uniform01(rng) * (200 - 2 * w - 2));
    int y = static_cast<int>(sfftest::uniform01(rng) * (200 - 2 * h - 2));
    double conf = 0.1 + sfftest::uniform01(rng) * 0.9;
    Roi r{x, y, w, h, conf};
    double base = frame_semantic_score({r}, 200, 200, spec);

    // enlarging around the same center never decreases the score
    Roi grown{x - 1, y - 1, w + 2, h + 2, conf};
    if (grown.x >= 0 && grown.y >= 0)
      CHECK(frame_semantic_score({grown}, 200, 200, spec) >= base);

    // moving the center strictly closer to the frame center never decreases
    double cx = r.center_x(), cy = r.center_y();
    int step_x = cx < 100 ? 1 : (cx > 100 ? -1 : 0);
    int step_y = cy < 100 ? 1 : (cy > 100 ? -1 : 0);
    if (step_x != 0 || step_y != 0) {
      Roi closer{x + step_x, y + step_y, w, h, conf};
      CHECK(frame_semantic_score({closer}, 200, 200, spec) >= base);
    }

    // confidence scales the contribution exactly linearly
    double t = sfftest::uniform01(rng);
    Roi scaled{x, y, w, h, conf * t};
    CHECK(frame_semantic_score({scaled}, 200, 200, spec) ==
          doctest::Approx(base * t).epsilon(1e-12));
  }
}

TEST_CASE("score series maps labels element-wise") {
  GaussianSpec spec = GaussianSpec::for_frame(64, 64);
  RoiLabels labels(4);
  labels[2].push_back(Roi{28, 28, 8, 8, 1.0});

  SemanticProfile p = score_series(labels, 4, 64, 64, spec);
  REQUIRE(p.size() == 4);
  CHECK(p.scores[0] == 0.0);
  CHECK(p.scores[1] == 0.0);
  CHECK(p.scores[2] == doctest::Approx(64.0));
  CHECK(p.scores[3] == 0.0);

  SemanticProfile q = score_series(labels, 4, 64, 64, spec);
  CHECK(p.scores == q.scores);  // pure

  try {
    score_series(labels, 5, 64, 64, spec);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::length_mismatch);
  }
}

TEST_CASE("profile csv round trip") {
  sfftest::TempDir dir("profile_csv");
  SemanticProfile p;
  p.scores = {0.0, 1.25, 3e-7, 123456.5};
  save_profile_csv(p, dir.path() / "scores.csv");
  SemanticProfile r = load_profile_csv(dir.path() / "scores.csv");
  CHECK(r.scores == p.scores);
}
