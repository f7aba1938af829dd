#include "sff/warp.hpp"

#include <cmath>

namespace sff {

namespace {

// Taps clamp to the image so samples within half a pixel of the border
// replicate the edge row/column.
inline double bilinear(const std::uint8_t* plane, int w, int h, int stride, int channels,
                       int channel, double x, double y) {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  double fx = x - x0, fy = y - y0;
  auto at = [&](int xx, int yy) {
    xx = xx < 0 ? 0 : (xx >= w ? w - 1 : xx);
    yy = yy < 0 ? 0 : (yy >= h ? h - 1 : yy);
    return static_cast<double>(plane[(static_cast<std::size_t>(yy) * stride + xx) * channels + channel]);
  };
  double top = at(x0, y0) * (1 - fx) + at(x0 + 1, y0) * fx;
  double bot = at(x0, y0 + 1) * (1 - fx) + at(x0 + 1, y0 + 1) * fx;
  return top * (1 - fy) + bot * fy;
}

inline std::uint8_t to_u8(double v) {
  int i = static_cast<int>(v + 0.5);
  return static_cast<std::uint8_t>(i < 0 ? 0 : (i > 255 ? 255 : i));
}

}  // namespace

MaskedFrame warp_frame(const Frame& frame, const Homography& h) {
  frame.validate();
  MaskedFrame out;
  out.frame.index = frame.index;
  out.frame.source_index = frame.source_index;
  out.frame.width = frame.width;
  out.frame.height = frame.height;
  const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
  out.frame.gray.assign(n, 0);
  if (frame.has_color()) out.frame.color.assign(n * 3, 0);
  out.valid.assign(n, 0);

  const Eigen::Matrix3d inv = h.m.inverse();
  // the image extends half a pixel beyond the outer pixel centers
  const double w_max = frame.width - 0.5, h_max = frame.height - 0.5;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      double den = inv(2, 0) * x + inv(2, 1) * y + inv(2, 2);
      if (std::fabs(den) < 1e-12) continue;
      double sx = (inv(0, 0) * x + inv(0, 1) * y + inv(0, 2)) / den;
      double sy = (inv(1, 0) * x + inv(1, 1) * y + inv(1, 2)) / den;
      if (sx < -0.5 || sx > w_max || sy < -0.5 || sy > h_max) continue;
      std::size_t p = static_cast<std::size_t>(y) * frame.width + x;
      out.frame.gray[p] = to_u8(bilinear(frame.gray.data(), frame.width, frame.height,
                                         frame.width, 1, 0, sx, sy));
      if (frame.has_color())
        for (int c = 0; c < 3; ++c)
          out.frame.color[3 * p + c] = to_u8(bilinear(frame.color.data(), frame.width,
                                                      frame.height, frame.width, 3, c, sx, sy));
      out.valid[p] = 1;
    }
  }
  return out;
}

double coverage(const MaskedFrame& frame, const Rect& rect) {
  if (rect.w < 1 || rect.h < 1 || rect.x < 0 || rect.y < 0 ||
      rect.x + rect.w > frame.frame.width || rect.y + rect.h > frame.frame.height)
    throw Error(Errc::invalid_argument, "rect outside frame bounds");
  long valid = 0;
  for (int y = rect.y; y < rect.y + rect.h; ++y)
    for (int x = rect.x; x < rect.x + rect.w; ++x)
      valid += frame.valid[static_cast<std::size_t>(y) * frame.frame.width + x] ? 1 : 0;
  return static_cast<double>(valid) / static_cast<double>(rect.area());
}

Rect centered_rect(int width, int height, double fraction) {
  if (fraction <= 0.0 || fraction > 1.0)
    throw Error(Errc::invalid_argument, "rect fraction outside (0, 1]");
  Rect r;
  r.w = std::max(1, static_cast<int>(std::lround(fraction * width)));
  r.h = std::max(1, static_cast<int>(std::lround(fraction * height)));
  r.w = std::min(r.w, width);
  r.h = std::min(r.h, height);
  r.x = (width - r.w) / 2;
  r.y = (height - r.h) / 2;
  return r;
}

Frame crop(const Frame& frame, const Rect& rect) {
  if (rect.w < 1 || rect.h < 1 || rect.x < 0 || rect.y < 0 || rect.x + rect.w > frame.width ||
      rect.y + rect.h > frame.height)
    throw Error(Errc::invalid_argument, "crop rect outside frame bounds");
  Frame out;
  out.index = frame.index;
  out.source_index = frame.source_index;
  out.width = rect.w;
  out.height = rect.h;
  out.gray.resize(static_cast<std::size_t>(rect.w) * rect.h);
  if (frame.has_color()) out.color.resize(out.gray.size() * 3);
  for (int y = 0; y < rect.h; ++y) {
    const std::size_t src = static_cast<std::size_t>(rect.y + y) * frame.width + rect.x;
    const std::size_t dst = static_cast<std::size_t>(y) * rect.w;
    std::copy_n(frame.gray.data() + src, rect.w, out.gray.data() + dst);
    if (frame.has_color())
      std::copy_n(frame.color.data() + 3 * src, 3 * static_cast<std::size_t>(rect.w),
                  out.color.data() + 3 * dst);
  }
  return out;
}

}  // namespace sff
