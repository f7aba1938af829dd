#include <doctest.h>

#include <fstream>

#include "sff/image_io.hpp"
#include "sff/roi_labels.hpp"
#include "test_util.hpp"

using namespace sff;
using sfftest::TempDir;

TEST_CASE("image round trip through png and pgm") {
  TempDir dir("frame_store_roundtrip");
  Frame f = sfftest::textured_frame(64, 48, 5);
  for (const char* ext : {"png", "pgm"}) {
    auto path = dir.path() / (std::string("img.") + ext);
    save_image(f, path);
    Frame r = load_image(path);
    CHECK(r.width == 64);
    CHECK(r.height == 48);
    CHECK(r.gray == f.gray);
  }
}

TEST_CASE("color png keeps rgb and derives gray deterministically") {
  TempDir dir("frame_store_color");
  Frame f;
  f.width = 16;
  f.height = 8;
  f.color.resize(16 * 8 * 3);
  std::mt19937_64 rng(3);
  for (auto& v : f.color) v = static_cast<std::uint8_t>(rng() & 0xff);
  derive_gray_from_color(f);
  save_image(f, dir.path() / "c.png");
  Frame r = load_image(dir.path() / "c.png");
  CHECK(r.color == f.color);
  CHECK(r.gray == f.gray);

  save_image(f, dir.path() / "c.ppm");
  Frame rp = load_image(dir.path() / "c.ppm");
  CHECK(rp.color == f.color);

  Frame again = r;
  derive_gray_from_color(again);
  CHECK(again.gray == r.gray);
}

TEST_CASE("load_image_sequence orders by numeric index and rebases") {
  TempDir dir("frame_store_seq");
  for (int i : {0, 1, 2, 3, 4, 5, 6, 7, 8, 9})
    save_image(sfftest::uniform_frame(20, 10, static_cast<std::uint8_t>(i)),
               dir.path() / ("frame_00" + std::to_string(i) + ".png"));
  FrameSequence seq = load_image_sequence(dir.path(), "*");
  REQUIRE(seq.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(seq[i].index == i);
    CHECK(seq[i].source_index == i);
    CHECK(seq[i].gray[0] == i);
  }
}

TEST_CASE("sequence with index gaps keeps source_index") {
  TempDir dir("frame_store_gaps");
  for (int i : {3, 7, 20})
    save_image(sfftest::uniform_frame(8, 8, static_cast<std::uint8_t>(i)),
               dir.path() / ("f_" + std::to_string(i) + ".pgm"));
  FrameSequence seq = load_image_sequence(dir.path());
  REQUIRE(seq.size() == 3);
  CHECK(seq[0].source_index == 3);
  CHECK(seq[2].source_index == 20);
  CHECK(seq[2].index == 2);
}

TEST_CASE("sequence errors") {
  TempDir dir("frame_store_errors");
  CHECK_THROWS_WITH_AS(load_image_sequence(dir.path()), doctest::Contains("EmptySequence"),
                       Error);

  save_image(sfftest::uniform_frame(20, 10, 1), dir.path() / "a_000.png");
  save_image(sfftest::uniform_frame(10, 10, 1), dir.path() / "a_001.png");
  try {
    load_image_sequence(dir.path());
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
}

TEST_CASE("glob pattern filters the directory") {
  TempDir dir("frame_store_glob");
  save_image(sfftest::uniform_frame(8, 8, 1), dir.path() / "a_000.png");
  save_image(sfftest::uniform_frame(8, 8, 2), dir.path() / "b_000.png");
  FrameSequence seq = load_image_sequence(dir.path(), "a_*.png");
  CHECK(seq.size() == 1);
  CHECK(seq[0].gray[0] == 1);
  CHECK(glob_match("frame_??.pgm", "frame_07.pgm"));
  CHECK_FALSE(glob_match("frame_??.pgm", "frame_007.pgm"));
}

TEST_CASE("roi labels load with empty fill and validation") {
  TempDir dir("labels");
  auto path = dir.path() / "labels.jsonl";
  {
    std::ofstream out(path);
    out << R"({"frame": 3, "rois": [{"x":10,"y":10,"w":20,"h":20,"conf":0.9}]})" << "\n";
  }
  RoiLabels labels = load_roi_labels(path, 5);
  REQUIRE(labels.size() == 5);
  CHECK(labels[0].empty());
  CHECK(labels[2].empty());
  REQUIRE(labels[3].size() == 1);
  CHECK(labels[3][0].confidence == doctest::Approx(0.9));
  CHECK(labels[4].empty());

  SUBCASE("confidence outside [0,1] is rejected") {
    std::ofstream out(path);
    out << R"({"frame": 0, "rois": [{"x":1,"y":1,"w":2,"h":2,"conf":1.5}]})" << "\n";
    out.close();
    try {
      load_roi_labels(path, 5);
      FAIL("expected InvalidRoi");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_roi);
    }
  }
  SUBCASE("frame beyond range is rejected") {
    std::ofstream out(path);
    out << R"({"frame": 9, "rois": []})" << "\n";
    out.close();
    try {
      load_roi_labels(path, 5);
      FAIL("expected OutOfRangeFrame");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::out_of_range_frame);
    }
  }
  SUBCASE("bad json is a parse error") {
    std::ofstream out(path);
    out << "{not json\n";
    out.close();
    try {
      load_roi_labels(path, 5);
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::parse_error);
    }
  }
}

TEST_CASE("empty label file gives all-empty lists") {
  TempDir dir("labels_empty");
  auto path = dir.path() / "labels.jsonl";
  std::ofstream(path).close();
  RoiLabels labels = load_roi_labels(path, 4);
  REQUIRE(labels.size() == 4);
  for (const auto& l : labels) CHECK(l.empty());
}

TEST_CASE("label save/load round trip") {
  TempDir dir("labels_rt");
  RoiLabels labels(3);
  labels[1].push_back(Roi{4, 5, 6, 7, 0.25});
  save_roi_labels(labels, dir.path() / "l.jsonl");
  RoiLabels back = load_roi_labels(dir.path() / "l.jsonl", 3);
  REQUIRE(back[1].size() == 1);
  CHECK(back[1][0].x == 4);
  CHECK(back[1][0].confidence == doctest::Approx(0.25));
}

TEST_CASE("validate_labels checks dimension-dependent invariants") {
  RoiLabels labels(1);
  labels[0].push_back(Roi{60, 0, 10, 10, 0.5});
  try {
    validate_labels(labels, 64, 64);
    FAIL("expected InvalidRoi");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_roi);
  }
  CHECK_NOTHROW(validate_labels(labels, 80, 64));
}

TEST_CASE("histogram of a uniform frame concentrates in one bin") {
  Frame f = sfftest::uniform_frame(10, 10, 128);
  Histogram h = color_histogram(f, 16);
  REQUIRE(h.channels() == 1);
  int nonzero = 0;
  for (double v : h.bins[0])
    if (v > 0) ++nonzero;
  CHECK(nonzero == 1);
  CHECK(h.bins[0][128 * 16 / 256] == doctest::Approx(1.0));
}

TEST_CASE("histogram of half black half white splits evenly") {
  Frame f = sfftest::uniform_frame(10, 10, 0);
  for (int y = 0; y < 10; ++y)
    for (int x = 5; x < 10; ++x) f.at(x, y) = 255;
  Histogram h = color_histogram(f, 2);
  CHECK(h.bins[0][0] == doctest::Approx(0.5));
  CHECK(h.bins[0][1] == doctest::Approx(0.5));
}

TEST_CASE("histogram channels each sum to one") {
  Frame f;
  f.width = 31;
  f.height = 17;
  f.color.resize(31 * 17 * 3);
  std::mt19937_64 rng(11);
  for (auto& v : f.color) v = static_cast<std::uint8_t>(rng() & 0xff);
  derive_gray_from_color(f);
  Histogram h = color_histogram(f, 13);
  REQUIRE(h.channels() == 3);
  for (int c = 0; c < 3; ++c) {
    double sum = 0;
    for (double v : h.bins[c]) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  try {
    color_histogram(f, 0);
    FAIL("expected ZeroBins");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::zero_bins);
  }
}
