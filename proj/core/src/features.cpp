#include "sff/features.hpp"

#include <algorithm>
#include <cmath>

namespace sff {

namespace {

constexpr int kPatch = 8;

// Bilinear read with the sample guaranteed inside [0, W-1] x [0, H-1].
inline float sample_bilinear(const Frame& f, float x, float y) {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  int x1 = std::min(x0 + 1, f.width - 1);
  int y1 = std::min(y0 + 1, f.height - 1);
  float fx = x - x0;
  float fy = y - y0;
  float v00 = f.at(x0, y0), v10 = f.at(x1, y0), v01 = f.at(x0, y1), v11 = f.at(x1, y1);
  return (v00 * (1 - fx) + v10 * fx) * (1 - fy) + (v01 * (1 - fx) + v11 * fx) * fy;
}

void fill_descriptor(const Frame& frame, const Keypoint& kp, float* out) {
  float sum = 0;
  for (int v = 0; v < kPatch; ++v)
    for (int u = 0; u < kPatch; ++u) {
      float s = sample_bilinear(frame, kp.x + u - 3.5f, kp.y + v - 3.5f);
      out[v * kPatch + u] = s;
      sum += s;
    }
  float mean = sum / (kPatch * kPatch);
  float norm2 = 0;
  for (int i = 0; i < kPatch * kPatch; ++i) {
    out[i] -= mean;
    norm2 += out[i] * out[i];
  }
  float norm = std::sqrt(norm2);
  if (norm > 1e-6f)
    for (int i = 0; i < kPatch * kPatch; ++i) out[i] /= norm;
  else
    std::fill(out, out + kPatch * kPatch, 0.0f);
}

}  // namespace

FeatureSet detect_features(const Frame& frame, const DetectorConfig& cfg) {
  frame.validate();
  FeatureSet fs;
  fs.descriptor_size = kPatch * kPatch;
  const int w = frame.width, h = frame.height;
  const int border = std::max(cfg.border, 2);
  if (w <= 2 * border || h <= 2 * border || cfg.max_features <= 0) return fs;

  // Sobel gradients and structure-tensor products.
  std::vector<double> ixx(static_cast<std::size_t>(w) * h, 0.0);
  std::vector<double> iyy(ixx.size(), 0.0);
  std::vector<double> ixy(ixx.size(), 0.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      double gx = (frame.at(x + 1, y - 1) + 2.0 * frame.at(x + 1, y) + frame.at(x + 1, y + 1)) -
                  (frame.at(x - 1, y - 1) + 2.0 * frame.at(x - 1, y) + frame.at(x - 1, y + 1));
      double gy = (frame.at(x - 1, y + 1) + 2.0 * frame.at(x, y + 1) + frame.at(x + 1, y + 1)) -
                  (frame.at(x - 1, y - 1) + 2.0 * frame.at(x, y - 1) + frame.at(x + 1, y - 1));
      std::size_t p = static_cast<std::size_t>(y) * w + x;
      ixx[p] = gx * gx;
      iyy[p] = gy * gy;
      ixy[p] = gx * gy;
    }
  }

  // Binomial 5x5 window (separable 1-4-6-4-1). A flat box would leave the
  // response constant across a corner and bias the NMS pick off-center.
  auto smooth = [&](std::vector<double>& img) {
    static const double k[5] = {1, 4, 6, 4, 1};
    std::vector<double> tmp(img.size(), 0.0);
    for (int y = 0; y < h; ++y)
      for (int x = 2; x < w - 2; ++x) {
        double acc = 0;
        for (int t = -2; t <= 2; ++t) acc += k[t + 2] * img[static_cast<std::size_t>(y) * w + x + t];
        tmp[static_cast<std::size_t>(y) * w + x] = acc;
      }
    for (int y = 2; y < h - 2; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0;
        for (int t = -2; t <= 2; ++t) acc += k[t + 2] * tmp[static_cast<std::size_t>(y + t) * w + x];
        img[static_cast<std::size_t>(y) * w + x] = acc / 256.0;
      }
  };
  smooth(ixx);
  smooth(iyy);
  smooth(ixy);

  std::vector<double> response(static_cast<std::size_t>(w) * h,
                               -std::numeric_limits<double>::infinity());
  double max_response = 0.0;
  for (int y = border; y < h - border; ++y) {
    for (int x = border; x < w - border; ++x) {
      std::size_t p = static_cast<std::size_t>(y) * w + x;
      double sxx = ixx[p], syy = iyy[p], sxy = ixy[p];
      double r = sxx * syy - sxy * sxy - cfg.harris_k * (sxx + syy) * (sxx + syy);
      response[p] = r;
      max_response = std::max(max_response, r);
    }
  }
  if (max_response <= 0.0) return fs;
  double threshold = cfg.quality_level * max_response;

  // 3x3 non-maximum suppression; exact ties keep the raster-first pixel.
  std::vector<Keypoint> kps;
  for (int y = border; y < h - border; ++y) {
    for (int x = border; x < w - border; ++x) {
      double r = response[static_cast<std::size_t>(y) * w + x];
      if (r < threshold) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy)
        for (int dx = -1; dx <= 1 && is_max; ++dx) {
          if (dx == 0 && dy == 0) continue;
          double rn = response[static_cast<std::size_t>(y + dy) * w + (x + dx)];
          if (rn > r || (rn == r && (dy < 0 || (dy == 0 && dx < 0)))) is_max = false;
        }
      if (is_max)
        kps.push_back(Keypoint{static_cast<float>(x), static_cast<float>(y), static_cast<float>(r)});
    }
  }

  std::sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  if (static_cast<int>(kps.size()) > cfg.max_features) kps.resize(cfg.max_features);

  fs.keypoints = std::move(kps);
  fs.descriptors.resize(fs.keypoints.size() * static_cast<std::size_t>(fs.descriptor_size));
  for (std::size_t i = 0; i < fs.keypoints.size(); ++i)
    fill_descriptor(frame, fs.keypoints[i], fs.descriptors.data() + i * fs.descriptor_size);
  return fs;
}

MatchSet match_features(const FeatureSet& a, const FeatureSet& b, double max_ratio) {
  MatchSet out;
  if (a.size() == 0 || b.size() == 0) return out;
  if (a.descriptor_size != b.descriptor_size)
    throw Error(Errc::invalid_argument, "descriptor lengths differ");

  const int d = a.descriptor_size;
  const int na = a.size(), nb = b.size();

  std::vector<int> best_b(na, -1), best_a(nb, -1);
  std::vector<float> best_b_d2(na, 0), best_a_d2(nb, 0);
  std::vector<float> second_b_d2(na, std::numeric_limits<float>::infinity());
  for (int i = 0; i < na; ++i) {
    const float* da = a.descriptor(i);
    for (int j = 0; j < nb; ++j) {
      const float* db = b.descriptor(j);
      float d2 = 0;
      for (int k = 0; k < d; ++k) {
        float diff = da[k] - db[k];
        d2 += diff * diff;
      }
      if (best_b[i] < 0 || d2 < best_b_d2[i]) {
        second_b_d2[i] = best_b[i] < 0 ? second_b_d2[i] : best_b_d2[i];
        best_b[i] = j;
        best_b_d2[i] = d2;
      } else if (d2 < second_b_d2[i]) {
        second_b_d2[i] = d2;
      }
      if (best_a[j] < 0 || d2 < best_a_d2[j]) {
        best_a[j] = i;
        best_a_d2[j] = d2;
      }
    }
  }
  const float ratio2 =
      max_ratio > 0 ? static_cast<float>(max_ratio * max_ratio) : 0.0f;
  for (int i = 0; i < na; ++i) {
    int j = best_b[i];
    if (j < 0 || best_a[j] != i) continue;
    if (ratio2 > 0 && std::isfinite(second_b_d2[i]) && best_b_d2[i] >= ratio2 * second_b_d2[i])
      continue;
    out.pairs.push_back(Match{i, j, std::sqrt(best_b_d2[i])});
  }
  return out;
}

}  // namespace sff
