#include "sff/homography.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

namespace sff {

namespace {

struct Rng {
  std::mt19937_64 engine;

  explicit Rng(std::uint64_t seed) : engine(seed) {}

  // Rejection-sampled bound keeps draws bit-identical across platforms
  // (mt19937_64 output is standardized, uniform_int_distribution is not).
  std::uint32_t bounded(std::uint32_t n) {
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = engine();
    } while (r >= limit);
    return static_cast<std::uint32_t>(r % n);
  }
};

inline double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                     const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Any three collinear points make the 4-point sample useless.
bool sample_degenerate(const Eigen::Vector2d* p) {
  for (int skip = 0; skip < 4; ++skip) {
    Eigen::Vector2d t[3];
    int k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) t[k++] = p[i];
    double area = std::fabs(cross2(t[0], t[1], t[2]));
    double scale = (t[1] - t[0]).norm() * (t[2] - t[0]).norm();
    if (area <= 1e-9 * std::max(scale, 1.0)) return true;
  }
  return false;
}

// Exact homography through 4 correspondences, h33 fixed to 1.
bool solve_minimal(const Eigen::Vector2d* a, const Eigen::Vector2d* b, Eigen::Matrix3d& h) {
  Eigen::Matrix<double, 8, 8> m = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 1> rhs;
  for (int i = 0; i < 4; ++i) {
    double x = a[i].x(), y = a[i].y(), u = b[i].x(), v = b[i].y();
    m.row(2 * i) << x, y, 1, 0, 0, 0, -x * u, -y * u;
    m.row(2 * i + 1) << 0, 0, 0, x, y, 1, -x * v, -y * v;
    rhs(2 * i) = u;
    rhs(2 * i + 1) = v;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(m);
  if (!lu.isInvertible()) return false;
  Eigen::Matrix<double, 8, 1> sol = lu.solve(rhs);
  if (!sol.allFinite()) return false;
  h << sol(0), sol(1), sol(2), sol(3), sol(4), sol(5), sol(6), sol(7), 1.0;
  return true;
}

int count_inliers(const Eigen::Matrix3d& h, const std::vector<Eigen::Vector2d>& a,
                  const std::vector<Eigen::Vector2d>& b, double threshold2,
                  std::vector<std::uint8_t>* mask) {
  int inliers = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    Eigen::Vector3d q = h * a[k].homogeneous();
    bool ok = false;
    if (std::fabs(q.z()) > 1e-12) {
      double du = q.x() / q.z() - b[k].x();
      double dv = q.y() / q.z() - b[k].y();
      ok = du * du + dv * dv < threshold2;
    }
    if (mask) (*mask)[k] = ok ? 1 : 0;
    if (ok) ++inliers;
  }
  return inliers;
}

}  // namespace

Homography Homography::from_matrix(const Eigen::Matrix3d& m) {
  double det = m.determinant();
  if (!std::isfinite(det) || std::fabs(det) < 1e-12)
    throw Error(Errc::degenerate_configuration, "homography matrix is singular");
  Homography h;
  h.m = m / std::cbrt(det);
  return h;
}

Homography Homography::translation(double tx, double ty) {
  Homography h;
  h.m(0, 2) = tx;
  h.m(1, 2) = ty;
  return h;
}

Homography Homography::inverse() const { return from_matrix(m.inverse()); }

Homography Homography::compose(const Homography& rhs) const { return from_matrix(m * rhs.m); }

Eigen::Vector2d Homography::apply(const Eigen::Vector2d& p) const {
  Eigen::Vector3d q = m * p.homogeneous();
  return q.hnormalized();
}

bool Homography::is_identity(double tol) const {
  return (m - Eigen::Matrix3d::Identity()).norm() <= tol;
}

Homography fit_homography(const std::vector<Eigen::Vector2d>& from,
                          const std::vector<Eigen::Vector2d>& to) {
  if (from.size() != to.size())
    throw Error(Errc::invalid_argument, "correspondence lists differ in length");
  const std::size_t n = from.size();
  if (n < 4) throw Error(Errc::too_few_matches, "need at least 4 correspondences");

  // Hartley normalization on both sides.
  auto normalizer = [](const std::vector<Eigen::Vector2d>& pts) {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    double mean_d = 0;
    for (const auto& p : pts) mean_d += (p - c).norm();
    mean_d /= static_cast<double>(pts.size());
    double s = mean_d > 1e-12 ? std::sqrt(2.0) / mean_d : 1.0;
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
    t(0, 0) = s;
    t(1, 1) = s;
    t(0, 2) = -s * c.x();
    t(1, 2) = -s * c.y();
    return t;
  };
  Eigen::Matrix3d ta = normalizer(from), tb = normalizer(to);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d p = ta * from[i].homogeneous();
    Eigen::Vector3d q = tb * to[i].homogeneous();
    double x = p.x() / p.z(), y = p.y() / p.z();
    double u = q.x() / q.z(), v = q.y() / q.z();
    a.row(2 * i) << x, y, 1, 0, 0, 0, -x * u, -y * u, -u;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -x * v, -y * v, -v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hm;
  hm << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography::from_matrix(tb.inverse() * hm * ta);
}

RansacResult estimate_homography_ransac(const MatchSet& matches,
                                        const std::vector<Keypoint>& a_points,
                                        const std::vector<Keypoint>& b_points,
                                        const RansacConfig& cfg) {
  const int n = matches.size();
  if (n < 4) throw Error(Errc::too_few_matches, "RANSAC needs at least 4 matches");

  std::vector<Eigen::Vector2d> pa(n), pb(n);
  for (int k = 0; k < n; ++k) {
    const Match& m = matches.pairs[k];
    pa[k] = Eigen::Vector2d(a_points[m.a].x, a_points[m.a].y);
    pb[k] = Eigen::Vector2d(b_points[m.b].x, b_points[m.b].y);
  }

  Rng rng(cfg.seed);
  const double threshold2 = cfg.threshold_px * cfg.threshold_px;
  Eigen::Matrix3d best_h;
  int best_inliers = -1;
  std::vector<std::uint8_t> mask(n, 0), best_mask;
  int max_iters = std::max(cfg.max_iters, 1);

  for (int it = 0; it < max_iters; ++it) {
    int idx[4];
    for (int s = 0; s < 4;) {
      int cand = static_cast<int>(rng.bounded(static_cast<std::uint32_t>(n)));
      bool dup = false;
      for (int t = 0; t < s; ++t) dup |= idx[t] == cand;
      if (!dup) idx[s++] = cand;
    }
    Eigen::Vector2d sa[4], sb[4];
    for (int s = 0; s < 4; ++s) {
      sa[s] = pa[idx[s]];
      sb[s] = pb[idx[s]];
    }
    if (sample_degenerate(sa) || sample_degenerate(sb)) continue;

    Eigen::Matrix3d h;
    if (!solve_minimal(sa, sb, h)) continue;
    int inliers = count_inliers(h, pa, pb, threshold2, &mask);
    if (inliers > best_inliers) {
      best_inliers = inliers;
      best_h = h;
      best_mask = mask;
      // Standard adaptive stop: enough iterations to hit the confidence
      // target at the current inlier ratio.
      double ratio = static_cast<double>(inliers) / n;
      double p_all = ratio * ratio * ratio * ratio;
      if (p_all >= 1.0 - 1e-12) break;
      if (p_all > 0) {
        double needed = std::log(1.0 - cfg.confidence) / std::log(1.0 - p_all);
        if (needed < max_iters) max_iters = std::max(it + 1, static_cast<int>(needed) + 1);
      }
    }
  }
  if (best_inliers < 4)
    throw Error(Errc::degenerate_configuration, "no homography with 4 inliers found");

  // Least-squares refit on the consensus set, then a final recount.
  RansacResult result;
  std::vector<Eigen::Vector2d> ia, ib;
  for (int k = 0; k < n; ++k)
    if (best_mask[k]) {
      ia.push_back(pa[k]);
      ib.push_back(pb[k]);
    }
  Eigen::Matrix3d refit = best_h;
  try {
    refit = fit_homography(ia, ib).m;
  } catch (const Error&) {
    refit = best_h;
  }
  int refit_inliers = count_inliers(refit, pa, pb, threshold2, &mask);
  if (refit_inliers >= best_inliers) {
    result.h = Homography::from_matrix(refit);
    result.inliers = refit_inliers;
    result.inlier_mask = mask;
  } else {
    result.h = Homography::from_matrix(best_h);
    result.inliers = best_inliers;
    result.inlier_mask = best_mask;
  }
  return result;
}

int inlier_score(const Frame& a, const Frame& b, const DetectorConfig& det,
                 const RansacConfig& ransac) {
  FeatureSet fa = detect_features(a, det);
  FeatureSet fb = detect_features(b, det);
  if (fa.size() == 0 || fb.size() == 0) return 0;
  MatchSet matches = match_features(fa, fb);
  if (matches.size() < 4) return 0;
  RansacConfig rc = ransac;
  rc.seed = mix_seed(ransac.seed, static_cast<std::uint64_t>(a.index),
                     static_cast<std::uint64_t>(b.index));
  try {
    return estimate_homography_ransac(matches, fa.keypoints, fb.keypoints, rc).inliers;
  } catch (const Error&) {
    return 0;
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

}  // namespace sff
