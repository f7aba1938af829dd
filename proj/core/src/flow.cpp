#include "sff/flow.hpp"

#include <algorithm>
#include <cmath>

#include "sff/emd.hpp"
#include "sff/parallel.hpp"

namespace sff {

FoeEstimate estimate_foe(const std::vector<FlowVector>& flow, const FoeConfig& cfg) {
  // Perpendicular least squares: minimize sum over vectors of
  // (n_k . (x - p_k))^2 with n_k the unit normal of the flow direction.
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> lines;  // (normal, point)
  for (const FlowVector& f : flow) {
    double len = f.displacement.norm();
    if (len <= cfg.min_displacement) continue;
    Eigen::Vector2d n(-f.displacement.y() / len, f.displacement.x() / len);
    a += n * n.transpose();
    b += n * n.dot(f.point);
    lines.emplace_back(n, f.point);
  }
  if (lines.size() < 2)
    throw Error(Errc::invalid_argument, "need at least 2 non-zero flow vectors");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
  double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
  if (lo <= 0.0 || hi / lo > cfg.condition_bound)
    throw Error(Errc::ill_conditioned, "flow field is (near) parallel");

  FoeEstimate foe;
  foe.point = a.ldlt().solve(b);
  double sum = 0.0;
  for (const auto& [n, p] : lines) sum += std::fabs(n.dot(foe.point - p));
  foe.residual = sum / static_cast<double>(lines.size());
  return foe;
}

double instability_cost_from_flow(const std::vector<FlowVector>& flow, int width, int height,
                                  const FoeConfig& cfg) {
  Eigen::Vector2d center(width / 2.0, height / 2.0);
  double half_diagonal = 0.5 * std::sqrt(static_cast<double>(width) * width +
                                         static_cast<double>(height) * height);
  try {
    FoeEstimate foe = estimate_foe(flow, cfg);
    if (foe.residual > cfg.residual_bound) return 1.0;  // incoherent field
    double cost = (foe.point - center).norm() / half_diagonal;
    return std::clamp(cost, 0.0, 1.0);
  } catch (const Error&) {
    return 1.0;  // degenerate transitions are maximally unstable
  }
}

std::vector<FlowVector> sparse_flow(const FeatureSet& fa, const FeatureSet& fb) {
  // Flow estimation keeps confident matches only; ambiguous pairs feed
  // the FOE with fabricated intersections.
  MatchSet matches = match_features(fa, fb, 0.8);
  std::vector<FlowVector> flow;
  flow.reserve(matches.pairs.size());
  for (const Match& m : matches.pairs) {
    Eigen::Vector2d p(fa.keypoints[m.a].x, fa.keypoints[m.a].y);
    Eigen::Vector2d q(fb.keypoints[m.b].x, fb.keypoints[m.b].y);
    flow.push_back(FlowVector{p, q - p});
  }
  return flow;
}

double instability_cost(const Frame& a, const Frame& b, const MotionConfig& cfg) {
  FeatureSet fa = detect_features(a, cfg.detector);
  FeatureSet fb = detect_features(b, cfg.detector);
  if (fa.size() == 0 || fb.size() == 0) return 1.0;
  std::vector<FlowVector> flow = sparse_flow(fa, fb);
  if (static_cast<int>(flow.size()) < std::max(2, cfg.min_flow_matches)) return 1.0;
  return instability_cost_from_flow(flow, a.width, a.height, cfg.foe);
}

double velocity_cost_from_mean(double mean_magnitude, double target_magnitude) {
  if (target_magnitude <= 0.0)
    throw Error(Errc::zero_target, "target flow magnitude must be positive");
  double v = std::fabs(target_magnitude - mean_magnitude) / target_magnitude;
  return std::clamp(v, 0.0, 1.0);
}

double velocity_cost(const std::vector<double>& adjacent_magnitudes, double target_magnitude) {
  if (adjacent_magnitudes.empty())
    throw Error(Errc::invalid_argument, "empty magnitude window");
  double sum = 0.0;
  for (double m : adjacent_magnitudes) {
    if (m < 0.0) throw Error(Errc::invalid_argument, "negative flow magnitude");
    sum += m;
  }
  return velocity_cost_from_mean(sum / static_cast<double>(adjacent_magnitudes.size()),
                                 target_magnitude);
}

FlowMagnitudes impute_flow_magnitudes(const std::vector<std::optional<double>>& raw) {
  FlowMagnitudes out;
  out.values.resize(raw.size(), 0.0);
  out.imputed.resize(raw.size(), 0);

  std::vector<double> measured;
  for (const auto& v : raw)
    if (v) measured.push_back(*v);
  auto median_of = [](std::vector<double> v) -> double {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  double overall = median_of(measured);

  std::vector<double> prefix;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (raw[k]) {
      out.values[k] = *raw[k];
      prefix.push_back(*raw[k]);
    } else {
      out.values[k] = prefix.empty() ? overall : median_of(prefix);
      out.imputed[k] = 1;
    }
  }
  return out;
}

FlowMagnitudes flow_magnitudes(const FrameSequence& seq, const DetectorConfig& cfg, int jobs) {
  if (seq.size() < 2) throw Error(Errc::too_short, "need at least 2 frames");

  std::vector<FeatureSet> features(seq.size());
  parallel_for(seq.size(), jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) features[i] = detect_features(seq[static_cast<int>(i)], cfg);
  });

  std::vector<std::optional<double>> raw(seq.size() - 1);
  parallel_for(raw.size(), jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      std::vector<FlowVector> flow = sparse_flow(features[k], features[k + 1]);
      if (flow.empty()) continue;
      double sum = 0.0;
      for (const FlowVector& f : flow) sum += f.displacement.norm();
      raw[k] = sum / static_cast<double>(flow.size());
    }
  });
  return impute_flow_magnitudes(raw);
}

double emd_1d(const Histogram& h1, const Histogram& h2) {
  if (h1.bin_count != h2.bin_count || h1.channels() != h2.channels())
    throw Error(Errc::bin_mismatch, "histogram layouts differ");
  if (h1.channels() == 0) throw Error(Errc::bin_mismatch, "empty histograms");
  if (h1.bin_count < 2) return 0.0;

  double total = 0.0;
  for (int c = 0; c < h1.channels(); ++c) {
    double cdf1 = 0.0, cdf2 = 0.0, moved = 0.0;
    for (int b = 0; b < h1.bin_count; ++b) {
      cdf1 += h1.bins[c][b];
      cdf2 += h2.bins[c][b];
      moved += std::fabs(cdf1 - cdf2);
    }
    total += moved / (h1.bin_count - 1);
  }
  return total / h1.channels();
}

}  // namespace sff
