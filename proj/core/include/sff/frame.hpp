#pragma once

#include <cstdint>
#include <vector>

#include "sff/error.hpp"

namespace sff {

/// One raster image of a sequence. The grayscale plane is always present;
/// the interleaved RGB plane only when the source data had color.
struct Frame {
  int index = 0;         // 0-based position in the sequence
  int source_index = 0;  // numeric index parsed from the file name (may have gaps)
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> gray;   // width*height
  std::vector<std::uint8_t> color;  // width*height*3, empty for gray-only frames

  bool has_color() const { return !color.empty(); }

  std::uint8_t at(int x, int y) const { return gray[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return gray[static_cast<std::size_t>(y) * width + x]; }

  void validate() const;
};

struct FrameSequence {
  std::vector<Frame> frames;
  double fps = 30.0;

  int size() const { return static_cast<int>(frames.size()); }
  bool empty() const { return frames.empty(); }
  const Frame& operator[](int i) const { return frames[i]; }
  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }

  void validate() const;
};

/// Axis-aligned detection rectangle with classifier confidence.
struct Roi {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  double confidence = 0.0;

  double area() const { return static_cast<double>(w) * h; }
  double center_x() const { return x + w / 2.0; }
  double center_y() const { return y + h / 2.0; }

  // Checks the dimension-free part of the invariants (the rest needs frame size).
  bool basic_valid() const {
    return x >= 0 && y >= 0 && w >= 1 && h >= 1 && confidence >= 0.0 && confidence <= 1.0;
  }
  bool valid_for(int width, int height) const {
    return basic_valid() && x + w <= width && y + h <= height;
  }
};

/// Per-channel normalized intensity histogram.
struct Histogram {
  std::vector<std::vector<double>> bins;  // [channel][bin], each channel sums to 1
  int bin_count = 0;

  int channels() const { return static_cast<int>(bins.size()); }
};

// Rec. 601 luma, rounded to nearest. Used everywhere a gray plane is
// derived from color so the conversion is a single convention.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  double v = 0.299 * r + 0.587 * g + 0.114 * b;
  int i = static_cast<int>(v + 0.5);
  return static_cast<std::uint8_t>(i > 255 ? 255 : i);
}

void derive_gray_from_color(Frame& frame);

/// Histogram over the color channels (or the gray plane as a single
/// channel), each channel normalized to unit mass. Throws Errc::zero_bins.
Histogram color_histogram(const Frame& frame, int bin_count);

}  // namespace sff
