#pragma once

#include <filesystem>
#include <vector>

#include "sff/segmentation.hpp"

namespace sff {

struct PlannerConfig {
  double lambda1 = 0.03;  // spread penalty |F_ns - F_s|
  double lambda2 = 0.5;   // semantic-rate penalty |F_s|
  int f_max = 0;          // ceiling of the F_ns search range; 0 = 10 * F_d
};

struct SpeedupPlan {
  int f_d = 0;
  int f_s = 0;
  int f_ns = 0;
  double residual = 0.0;   // |L/F_d - (L_s/F_s + L_ns/F_ns)| at the optimum
  double objective = 0.0;  // residual + lambda terms
};

/// Length error of a candidate rate pair against the desired overall rate.
double speedup_residual(long l_s, long l_ns, int f_d, int f_s, int f_ns);

/// Integer pair (F_s, F_ns) minimizing residual + lambda1*|F_ns - F_s| +
/// lambda2*|F_s| subject to F_s <= F_d <= F_ns and F_ns <= F_max.
/// Ties break toward smaller F_s, then smaller F_ns.
/// Throws infeasible_bounds when F_max < F_d, invalid_argument on empty input.
SpeedupPlan estimate_speedups(long l_s, long l_ns, int f_d, const PlannerConfig& cfg);

/// Copies the planned per-class rates onto the segments.
std::vector<Segment> assign_segment_speedups(std::vector<Segment> segments,
                                             const SpeedupPlan& plan);

void save_plan_json(const SpeedupPlan& plan, const std::vector<Segment>& segments,
                    const std::filesystem::path& path);
struct LoadedPlan {
  SpeedupPlan plan;
  std::vector<Segment> segments;
};
LoadedPlan load_plan_json(const std::filesystem::path& path);

void save_segments_json(const std::vector<Segment>& segments, const OtsuResult& otsu,
                        const std::filesystem::path& path);
struct LoadedSegments {
  std::vector<Segment> segments;
  OtsuResult otsu;
};
LoadedSegments load_segments_json(const std::filesystem::path& path);

}  // namespace sff
