#pragma once

#include <filesystem>
#include <vector>

#include "sff/frame.hpp"

namespace sff {

using RoiLabels = std::vector<std::vector<Roi>>;  // one ROI list per frame

/// Reads a JSON Lines label file, one record per line:
///   {"frame": int, "rois": [{"x":int,"y":int,"w":int,"h":int,"conf":float}]}
/// Frames absent from the file get an empty list. Multiple records for the
/// same frame append. Throws parse_error, out_of_range_frame, invalid_roi.
RoiLabels load_roi_labels(const std::filesystem::path& path, int n_frames);

void save_roi_labels(const RoiLabels& labels, const std::filesystem::path& path);

/// Dimension-dependent part of the Roi invariants, checked once frame
/// geometry is known. Throws invalid_roi.
void validate_labels(const RoiLabels& labels, int width, int height);

}  // namespace sff
