#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sff/features.hpp"

namespace sff {

/// 3x3 projective transform, stored det-normalized (det = 1).
struct Homography {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  static Homography identity() { return {}; }
  /// Rescales an arbitrary nonsingular matrix to det 1.
  /// Throws degenerate_configuration when det is (near) zero.
  static Homography from_matrix(const Eigen::Matrix3d& m);
  static Homography translation(double tx, double ty);

  Homography inverse() const;
  Homography compose(const Homography& rhs) const;  // this * rhs
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const;
  bool is_identity(double tol = 0.0) const;
};

struct RansacConfig {
  double threshold_px = 3.0;
  int max_iters = 2000;
  std::uint64_t seed = 17;
  double confidence = 0.995;  // adaptive early-exit target
};

struct RansacResult {
  Homography h;
  int inliers = 0;
  std::vector<std::uint8_t> inlier_mask;  // per input match
};

/// Seeded RANSAC over 4-point samples with a final least-squares refit on
/// the consensus set. Maps a-points toward b-points. Bit-deterministic for
/// a fixed seed. Throws too_few_matches (< 4 matches) and
/// degenerate_configuration (no valid model found).
RansacResult estimate_homography_ransac(const MatchSet& matches,
                                        const std::vector<Keypoint>& a_points,
                                        const std::vector<Keypoint>& b_points,
                                        const RansacConfig& cfg);

/// R(x, y) of the master-selection and replacement scores: the RANSAC
/// inlier count of the detect -> match -> estimate chain. Degenerate
/// stages score 0 instead of throwing.
int inlier_score(const Frame& a, const Frame& b, const DetectorConfig& det,
                 const RansacConfig& ransac);

/// Least-squares homography from >= 4 correspondences (normalized DLT).
Homography fit_homography(const std::vector<Eigen::Vector2d>& from,
                          const std::vector<Eigen::Vector2d>& to);

/// Mixes the global seed with a pair identity so per-pair RANSAC draws are
/// independent of evaluation order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace sff
