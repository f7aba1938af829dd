#include "sff/frame.hpp"

namespace sff {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::empty_sequence: return "EmptySequence";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::decode_error: return "DecodeError";
    case Errc::parse_error: return "ParseError";
    case Errc::out_of_range_frame: return "OutOfRangeFrame";
    case Errc::invalid_roi: return "InvalidRoi";
    case Errc::zero_bins: return "ZeroBins";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::infeasible_bounds: return "InfeasibleBounds";
    case Errc::too_few_matches: return "TooFewMatches";
    case Errc::degenerate_configuration: return "DegenerateConfiguration";
    case Errc::ill_conditioned: return "IllConditioned";
    case Errc::zero_target: return "ZeroTarget";
    case Errc::bin_mismatch: return "BinMismatch";
    case Errc::unreachable: return "Unreachable";
    case Errc::branch_failure: return "BranchFailure";
    case Errc::no_candidates: return "NoCandidates";
    case Errc::too_short: return "TooShort";
    case Errc::empty_output: return "EmptyOutput";
    case Errc::io_error: return "IoError";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

void Frame::validate() const {
  if (width <= 0 || height <= 0)
    throw Error(Errc::dimension_mismatch, "frame dimensions must be positive");
  if (gray.size() != static_cast<std::size_t>(width) * height)
    throw Error(Errc::dimension_mismatch, "gray plane size does not match dimensions");
  if (!color.empty() && color.size() != static_cast<std::size_t>(width) * height * 3)
    throw Error(Errc::dimension_mismatch, "color plane size does not match dimensions");
}

void FrameSequence::validate() const {
  int last = -1;
  for (const Frame& f : frames) {
    f.validate();
    if (f.width != width() || f.height != height())
      throw Error(Errc::dimension_mismatch, "frames differ in size");
    if (f.source_index <= last)
      throw Error(Errc::decode_error, "frame indices are not strictly increasing");
    last = f.source_index;
  }
}

void derive_gray_from_color(Frame& frame) {
  frame.gray.resize(static_cast<std::size_t>(frame.width) * frame.height);
  for (std::size_t p = 0; p < frame.gray.size(); ++p) {
    const std::uint8_t* c = frame.color.data() + 3 * p;
    frame.gray[p] = luma(c[0], c[1], c[2]);
  }
}

Histogram color_histogram(const Frame& frame, int bin_count) {
  if (bin_count <= 0) throw Error(Errc::zero_bins, "histogram needs at least one bin");
  frame.validate();

  Histogram h;
  h.bin_count = bin_count;
  const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
  const int channels = frame.has_color() ? 3 : 1;
  h.bins.assign(channels, std::vector<double>(bin_count, 0.0));

  for (int c = 0; c < channels; ++c) {
    std::vector<double>& bins = h.bins[c];
    for (std::size_t p = 0; p < n; ++p) {
      std::uint8_t v = frame.has_color() ? frame.color[3 * p + c] : frame.gray[p];
      int b = static_cast<int>(v) * bin_count / 256;
      bins[b] += 1.0;
    }
    if (n > 0) {
      for (double& v : bins) v /= static_cast<double>(n);
    }
  }
  return h;
}

}  // namespace sff
