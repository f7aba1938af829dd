#include "sff/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "sff/parallel.hpp"

namespace sff {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// 53-bit uniform in [0, 1); raw mt19937_64 output keeps the stream
// bit-identical across platforms.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
}

struct Canvas {
  int width = 0;
  int height = 0;
  std::vector<float> base;  // texture before palette drift

  float at(int x, int y) const { return base[static_cast<std::size_t>(y) * width + x]; }
};

// Bilinearly interpolated random lattice, one octave of value noise.
void add_value_noise(Canvas& canvas, std::mt19937_64& rng, int cell, double amplitude) {
  int gw = canvas.width / cell + 2, gh = canvas.height / cell + 2;
  std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
  for (double& v : lattice) v = uniform01(rng) * 2.0 - 1.0;
  for (int y = 0; y < canvas.height; ++y) {
    double gy = static_cast<double>(y) / cell;
    int y0 = static_cast<int>(gy);
    double fy = gy - y0;
    for (int x = 0; x < canvas.width; ++x) {
      double gx = static_cast<double>(x) / cell;
      int x0 = static_cast<int>(gx);
      double fx = gx - x0;
      auto l = [&](int xx, int yy) { return lattice[static_cast<std::size_t>(yy) * gw + xx]; };
      double v = (l(x0, y0) * (1 - fx) + l(x0 + 1, y0) * fx) * (1 - fy) +
                 (l(x0, y0 + 1) * (1 - fx) + l(x0 + 1, y0 + 1) * fx) * fy;
      canvas.base[static_cast<std::size_t>(y) * canvas.width + x] += static_cast<float>(amplitude * v);
    }
  }
}

Canvas make_canvas(const SyntheticSceneSpec& spec, int width, int height, std::mt19937_64& rng) {
  Canvas canvas;
  canvas.width = width;
  canvas.height = height;
  canvas.base.assign(static_cast<std::size_t>(width) * height, 128.0f);

  if (spec.texture == "checker") {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        canvas.base[static_cast<std::size_t>(y) * width + x] = ((x / 16 + y / 16) & 1) ? 192.0f : 64.0f;
  } else if (spec.texture == "stripes") {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        canvas.base[static_cast<std::size_t>(y) * width + x] =
            static_cast<float>(128.0 + 70.0 * std::sin(kTwoPi * x / 24.0));
  } else {
    add_value_noise(canvas, rng, 32, 36.0);
    add_value_noise(canvas, rng, 16, 20.0);
    add_value_noise(canvas, rng, 8, 11.0);
  }
  // fine per-pixel grain so the corner detector always has texture
  for (float& v : canvas.base) v += static_cast<float>(uniform01(rng) * 12.0 - 6.0);

  // scatter high-contrast dots; smooth noise alone has too few
  // distinctive corners for reliable matching
  int n_dots = width * height / 350;
  for (int d = 0; d < n_dots; ++d) {
    int x = uniform_int(rng, 1, width - 4);
    int y = uniform_int(rng, 1, height - 4);
    float delta = static_cast<float>((uniform01(rng) < 0.5 ? -1.0 : 1.0) *
                                     (45.0 + uniform01(rng) * 40.0));
    int size = 2 + uniform_int(rng, 0, 1);
    for (int yy = y; yy < y + size; ++yy)
      for (int xx = x; xx < x + size; ++xx)
        canvas.base[static_cast<std::size_t>(yy) * width + xx] += delta;
  }
  return canvas;
}

inline std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : static_cast<int>(v + 0.5)));
}

// Slow intensity drift along the canvas x-axis, two incommensurate
// periods per channel so the local slope rarely vanishes.
double palette_shift(const SyntheticSceneSpec& spec, double x, int channel) {
  if (spec.palette_amp == 0.0) return 0.0;
  double phase = channel * 2.0943951023931953;  // 2*pi/3 per channel
  double p1 = spec.palette_period;
  double p2 = spec.palette_period * 0.618;
  return spec.palette_amp * (std::sin(kTwoPi * x / p1 + phase) +
                             0.6 * std::sin(kTwoPi * x / p2 + 1.0 + phase));
}

// Semantic objects live in the canvas like everything else, so they move
// with the world instead of forming a second motion layer. `variant`
// randomizes the glyph; identical repeating patterns would alias against
// each other at skips near their spacing.
void draw_canvas_pattern(Canvas& canvas, int px, int py, int w, int h, std::uint64_t variant) {
  for (int y = py; y < py + h; ++y) {
    for (int x = px; x < px + w; ++x) {
      if (x < 0 || y < 0 || x >= canvas.width || y >= canvas.height) continue;
      int lx = x - px, ly = y - py;
      bool border = lx < 3 || ly < 3 || lx >= w - 3 || ly >= h - 3;
      int cell = (lx * 4 / std::max(w, 1)) + 4 * (ly * 4 / std::max(h, 1));  // 4x4 glyph grid
      bool ink = (variant >> cell) & 1;
      canvas.base[static_cast<std::size_t>(y) * canvas.width + x] =
          border ? 20.0f : (ink ? 45.0f : 225.0f);
    }
  }
}

}  // namespace

SyntheticScene generate_synthetic_scene(const SyntheticSceneSpec& spec) {
  if (spec.n_frames < 1 || spec.width < 16 || spec.height < 16)
    throw Error(Errc::invalid_argument, "scene too small");
  if (spec.jitter_translation < 0 || spec.jitter_rotation < 0)
    throw Error(Errc::invalid_argument, "jitter magnitudes must be >= 0");
  for (const auto& block : spec.semantic_blocks)
    if (block.start < 0 || block.end >= spec.n_frames || block.start > block.end)
      throw Error(Errc::invalid_argument, "semantic block outside the frame range");

  std::mt19937_64 rng(spec.seed);

  // Base path plus jitter, rounded to integer offsets (exact crops while
  // rotation stays zero).
  std::vector<Eigen::Vector2d> offsets(spec.n_frames);
  std::vector<double> angles(spec.n_frames, 0.0);
  const int jit = static_cast<int>(std::lround(spec.jitter_translation));
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (int k = 0; k < spec.n_frames; ++k) {
    double bx = spec.vx * k;
    double by = spec.vy * k;
    if (spec.sway_period > 0) {
      bx += spec.sway_amp_x * std::sin(kTwoPi * k / spec.sway_period);
      by += spec.sway_amp_y * std::sin(kTwoPi * k / spec.sway_period);
    }
    int jx = jit > 0 ? uniform_int(rng, -jit, jit) : 0;
    int jy = jit > 0 ? uniform_int(rng, -jit, jit) : 0;
    double rot = spec.jitter_rotation > 0
                     ? (uniform01(rng) * 2.0 - 1.0) * spec.jitter_rotation * kTwoPi / 360.0
                     : 0.0;
    offsets[k] = Eigen::Vector2d(std::round(bx) + jx, std::round(by) + jy);
    angles[k] = rot;
    min_x = std::min(min_x, offsets[k].x());
    max_x = std::max(max_x, offsets[k].x());
    min_y = std::min(min_y, offsets[k].y());
    max_y = std::max(max_y, offsets[k].y());
  }

  if (!spec.semantic_blocks.empty() && spec.jitter_rotation > 0)
    throw Error(Errc::invalid_argument,
                "semantic blocks and rotation jitter cannot be combined (labels "
                "assume axis-aligned windows)");

  int margin = 16 + (spec.jitter_rotation > 0 ? std::max(spec.width, spec.height) / 4 : 0);
  int canvas_w = spec.width + static_cast<int>(max_x - min_x) + 2 * margin;
  int canvas_h = spec.height + static_cast<int>(max_y - min_y) + 2 * margin;
  Canvas canvas = make_canvas(spec, canvas_w, canvas_h, rng);
  const double origin_x = margin - min_x;
  const double origin_y = margin - min_y;

  std::vector<std::uint8_t> in_block(spec.n_frames, 0);
  for (const auto& block : spec.semantic_blocks)
    for (int k = block.start; k <= block.end; ++k) in_block[k] = 1;

  // Plant a train of semantic patterns along each block's canvas span,
  // spaced so that every block frame fully contains at least one even
  // under jitter.
  const int roi_w = std::min(spec.roi_w, spec.width - 2);
  const int roi_h = std::min(spec.roi_h, spec.height - 2);
  struct Planted {
    double x, y;
  };
  std::vector<Planted> planted;
  const int jit_margin = jit + 2;
  for (std::size_t b = 0; b < spec.semantic_blocks.size(); ++b) {
    const auto& block = spec.semantic_blocks[b];
    double first = origin_x + offsets[block.start].x() + jit_margin + (spec.width - roi_w) / 2.0;
    double last = origin_x + offsets[block.end].x() + jit_margin + (spec.width - roi_w) / 2.0;
    if (last < first) std::swap(first, last);
    double spacing = std::max(8.0, spec.width - roi_w - 2.0 * jit_margin - 8.0);
    double span = last - first;
    int idx = 0;
    std::vector<double> xs;
    if (span <= spacing) {
      xs.push_back((first + last) / 2.0);  // one pattern covers the whole block
    } else {
      int steps = static_cast<int>(std::ceil(span / spacing));
      for (int i = 0; i <= steps; ++i) xs.push_back(first + span * i / steps);
    }
    for (double px : xs) {
      double py = origin_y + offsets[block.start].y() + (spec.height - roi_h) / 2.0 +
                  ((idx++ % 3) - 1) * 8.0;
      planted.push_back(Planted{px, py});
      draw_canvas_pattern(canvas, static_cast<int>(std::lround(px)),
                          static_cast<int>(std::lround(py)), roi_w, roi_h, rng());
    }
  }

  SyntheticScene scene;
  scene.offsets = offsets;
  scene.frames.frames.resize(spec.n_frames);
  scene.labels.resize(spec.n_frames);

  for (int k = 0; k < spec.n_frames; ++k) {
    Frame& f = scene.frames.frames[k];
    f.index = k;
    f.source_index = k;
    f.width = spec.width;
    f.height = spec.height;
    f.gray.resize(static_cast<std::size_t>(spec.width) * spec.height);
    if (spec.color) f.color.resize(f.gray.size() * 3);

    const double ox = origin_x + offsets[k].x();
    const double oy = origin_y + offsets[k].y();
    const double ca = std::cos(angles[k]), sa = std::sin(angles[k]);
    const double cx = spec.width / 2.0, cy = spec.height / 2.0;
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        // rotate about the frame center, then translate into the canvas
        double rx = ca * (x - cx) - sa * (y - cy) + cx + ox;
        double ry = sa * (x - cx) + ca * (y - cy) + cy + oy;
        int x0 = std::clamp(static_cast<int>(std::floor(rx)), 0, canvas.width - 1);
        int y0 = std::clamp(static_cast<int>(std::floor(ry)), 0, canvas.height - 1);
        int x1 = std::min(x0 + 1, canvas.width - 1);
        int y1 = std::min(y0 + 1, canvas.height - 1);
        double fx = std::clamp(rx - x0, 0.0, 1.0), fy = std::clamp(ry - y0, 0.0, 1.0);
        double v = (canvas.at(x0, y0) * (1 - fx) + canvas.at(x1, y0) * fx) * (1 - fy) +
                   (canvas.at(x0, y1) * (1 - fx) + canvas.at(x1, y1) * fx) * fy;
        std::size_t p = static_cast<std::size_t>(y) * spec.width + x;
        if (spec.color) {
          for (int c = 0; c < 3; ++c)
            f.color[3 * p + c] = clamp_u8(v + palette_shift(spec, rx, c));
          const std::uint8_t* cc = f.color.data() + 3 * p;
          f.gray[p] = luma(cc[0], cc[1], cc[2]);
        } else {
          f.gray[p] = clamp_u8(v + palette_shift(spec, rx, 0));
        }
      }
    }

    if (in_block[k]) {
      // the "detector" fires on every planted pattern fully inside the view
      for (const Planted& p : planted) {
        int fx = static_cast<int>(std::lround(p.x - (origin_x + offsets[k].x())));
        int fy = static_cast<int>(std::lround(p.y - (origin_y + offsets[k].y())));
        if (fx < 0 || fy < 0 || fx + roi_w > spec.width || fy + roi_h > spec.height) continue;
        scene.labels[k].push_back(Roi{fx, fy, roi_w, roi_h, 1.0});
      }
    }
  }

  // planted segment map, alternating and tiling the timeline
  int pos = 0;
  while (pos < spec.n_frames) {
    int run_start = pos;
    std::uint8_t kind = in_block[pos];
    while (pos < spec.n_frames && in_block[pos] == kind) ++pos;
    scene.true_segments.push_back(Segment{
        run_start, pos - 1, kind ? SegmentKind::semantic : SegmentKind::non_semantic, 0});
  }

  // ground-truth frame-to-frame-0 homographies from the planted path
  scene.gt_homographies.resize(spec.n_frames);
  auto frame_to_canvas = [&](int k) {
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    double c = std::cos(angles[k]), s = std::sin(angles[k]);
    double cx = spec.width / 2.0, cy = spec.height / 2.0;
    rot(0, 0) = c;
    rot(0, 1) = -s;
    rot(1, 0) = s;
    rot(1, 1) = c;
    rot(0, 2) = -c * cx + s * cy + cx + origin_x + offsets[k].x();
    rot(1, 2) = -s * cx - c * cy + cy + origin_y + offsets[k].y();
    return rot;
  };
  Eigen::Matrix3d to_frame0 = frame_to_canvas(0).inverse();
  for (int k = 0; k < spec.n_frames; ++k)
    scene.gt_homographies[k] = to_frame0 * frame_to_canvas(k);

  return scene;
}

namespace {

using nlohmann::json;

json spec_to_json(const SyntheticSceneSpec& s) {
  json blocks = json::array();
  for (const auto& b : s.semantic_blocks) blocks.push_back({{"start", b.start}, {"end", b.end}});
  return json{{"n_frames", s.n_frames},
              {"width", s.width},
              {"height", s.height},
              {"color", s.color},
              {"vx", s.vx},
              {"vy", s.vy},
              {"sway_amp_x", s.sway_amp_x},
              {"sway_amp_y", s.sway_amp_y},
              {"sway_period", s.sway_period},
              {"jitter_translation", s.jitter_translation},
              {"jitter_rotation", s.jitter_rotation},
              {"seed", s.seed},
              {"semantic_blocks", blocks},
              {"roi_w", s.roi_w},
              {"roi_h", s.roi_h},
              {"texture", s.texture},
              {"palette_amp", s.palette_amp},
              {"palette_period", s.palette_period}};
}

}  // namespace

void save_scene_spec_json(const SyntheticSceneSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << spec_to_json(spec).dump(2) << '\n';
}

SyntheticSceneSpec load_scene_spec_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  SyntheticSceneSpec s;
  try {
    s.n_frames = j.value("n_frames", s.n_frames);
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.color = j.value("color", s.color);
    s.vx = j.value("vx", s.vx);
    s.vy = j.value("vy", s.vy);
    s.sway_amp_x = j.value("sway_amp_x", s.sway_amp_x);
    s.sway_amp_y = j.value("sway_amp_y", s.sway_amp_y);
    s.sway_period = j.value("sway_period", s.sway_period);
    s.jitter_translation = j.value("jitter_translation", s.jitter_translation);
    s.jitter_rotation = j.value("jitter_rotation", s.jitter_rotation);
    s.seed = j.value("seed", s.seed);
    s.roi_w = j.value("roi_w", s.roi_w);
    s.roi_h = j.value("roi_h", s.roi_h);
    s.texture = j.value("texture", s.texture);
    s.palette_amp = j.value("palette_amp", s.palette_amp);
    s.palette_period = j.value("palette_period", s.palette_period);
    if (j.contains("semantic_blocks"))
      for (const json& b : j["semantic_blocks"])
        s.semantic_blocks.push_back({b.at("start").get<int>(), b.at("end").get<int>()});
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  return s;
}

void save_ground_truth_json(const SyntheticScene& scene, const std::filesystem::path& path) {
  json offsets = json::array();
  for (const auto& o : scene.offsets) offsets.push_back({o.x(), o.y()});
  json homs = json::array();
  for (const auto& h : scene.gt_homographies) {
    json row = json::array();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) row.push_back(h(r, c));
    homs.push_back(row);
  }
  json segs = json::array();
  for (const Segment& s : scene.true_segments)
    segs.push_back({{"start", s.start},
                    {"end", s.end},
                    {"kind", s.kind == SegmentKind::semantic ? "semantic" : "non_semantic"}});
  json j{{"offsets", offsets}, {"homographies_to_frame0", homs}, {"true_segments", segs}};
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace sff
