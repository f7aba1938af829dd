#pragma once

#include "sff/frame.hpp"

namespace sff {

/// One-dimensional Earth Mover's Distance between normalized histograms:
/// per channel sum |CDF1 - CDF2| / (bin_count - 1), averaged over channels.
/// Result lies in [0, 1]. Throws bin_mismatch on differing bin or channel
/// counts. A single-bin histogram pair is identically 0.
double emd_1d(const Histogram& h1, const Histogram& h2);

}  // namespace sff
