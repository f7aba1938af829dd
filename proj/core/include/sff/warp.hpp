#pragma once

#include <vector>

#include "sff/frame.hpp"
#include "sff/homography.hpp"

namespace sff {

/// A frame plus a per-pixel validity mask (1 where the pixel carries real
/// source content, 0 where warping left a hole).
struct MaskedFrame {
  Frame frame;
  std::vector<std::uint8_t> valid;

  bool is_valid(int x, int y) const { return valid[static_cast<std::size_t>(y) * frame.width + x] != 0; }
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long area() const { return static_cast<long>(w) * h; }
};

/// Applies `h` to the frame with inverse-mapped bilinear resampling.
/// Output keeps the input dimensions; pixels mapping outside the source
/// are black with valid = 0.
MaskedFrame warp_frame(const Frame& frame, const Homography& h);

/// Fraction of rect pixels marked valid. rect must lie inside the frame.
double coverage(const MaskedFrame& frame, const Rect& rect);

/// Centered rectangle covering `fraction` of each frame axis.
Rect centered_rect(int width, int height, double fraction);

Frame crop(const Frame& frame, const Rect& rect);

}  // namespace sff
