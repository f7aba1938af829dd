#include "sff/speedup.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace sff {

using nlohmann::json;

double speedup_residual(long l_s, long l_ns, int f_d, int f_s, int f_ns) {
  double desired = static_cast<double>(l_s + l_ns) / f_d;
  double actual = static_cast<double>(l_s) / f_s + static_cast<double>(l_ns) / f_ns;
  return std::fabs(desired - actual);
}

SpeedupPlan estimate_speedups(long l_s, long l_ns, int f_d, const PlannerConfig& cfg) {
  if (l_s < 0 || l_ns < 0 || l_s + l_ns <= 0)
    throw Error(Errc::invalid_argument, "segment lengths must be non-negative and not all zero");
  if (f_d < 1) throw Error(Errc::invalid_argument, "desired speed-up must be >= 1");
  int f_max = cfg.f_max > 0 ? cfg.f_max : 10 * f_d;
  if (f_max < f_d)
    throw Error(Errc::infeasible_bounds,
                "F_max " + std::to_string(f_max) + " < F_d " + std::to_string(f_d));

  // The constrained search space is a small integer grid; scan it in
  // (F_s, F_ns) order so the first strict minimum realizes the tie-break.
  SpeedupPlan best;
  bool have = false;
  for (int f_s = 1; f_s <= f_d; ++f_s) {
    for (int f_ns = f_d; f_ns <= f_max; ++f_ns) {
      if (f_s > f_ns) continue;
      double d = speedup_residual(l_s, l_ns, f_d, f_s, f_ns);
      double objective = d + cfg.lambda1 * std::abs(f_ns - f_s) + cfg.lambda2 * std::abs(f_s);
      if (!have || objective < best.objective) {
        best = SpeedupPlan{f_d, f_s, f_ns, d, objective};
        have = true;
      }
    }
  }
  return best;
}

std::vector<Segment> assign_segment_speedups(std::vector<Segment> segments,
                                             const SpeedupPlan& plan) {
  for (Segment& s : segments)
    s.speedup = s.kind == SegmentKind::semantic ? plan.f_s : plan.f_ns;
  return segments;
}

namespace {

const char* kind_name(SegmentKind k) {
  return k == SegmentKind::semantic ? "semantic" : "non_semantic";
}

SegmentKind kind_from(const std::string& name) {
  if (name == "semantic") return SegmentKind::semantic;
  if (name == "non_semantic") return SegmentKind::non_semantic;
  throw Error(Errc::parse_error, "unknown segment kind: " + name);
}

json segment_to_json(const Segment& s, bool with_speedup) {
  json j{{"start", s.start}, {"end", s.end}, {"kind", kind_name(s.kind)}};
  if (with_speedup) j["speedup"] = s.speedup;
  return j;
}

Segment segment_from_json(const json& j) {
  Segment s;
  s.start = j.at("start").get<int>();
  s.end = j.at("end").get<int>();
  s.kind = kind_from(j.at("kind").get<std::string>());
  s.speedup = j.value("speedup", 0);
  return s;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

void save_plan_json(const SpeedupPlan& plan, const std::vector<Segment>& segments,
                    const std::filesystem::path& path) {
  json segs = json::array();
  for (const Segment& s : segments) segs.push_back(segment_to_json(s, true));
  json j{{"F_d", plan.f_d},
         {"F_s", plan.f_s},
         {"F_ns", plan.f_ns},
         {"residual", plan.residual},
         {"segments", segs}};
  write_json_file(j, path);
}

LoadedPlan load_plan_json(const std::filesystem::path& path) {
  json j = read_json_file(path);
  LoadedPlan loaded;
  try {
    loaded.plan.f_d = j.at("F_d").get<int>();
    loaded.plan.f_s = j.at("F_s").get<int>();
    loaded.plan.f_ns = j.at("F_ns").get<int>();
    loaded.plan.residual = j.at("residual").get<double>();
    for (const json& s : j.at("segments")) loaded.segments.push_back(segment_from_json(s));
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  return loaded;
}

void save_segments_json(const std::vector<Segment>& segments, const OtsuResult& otsu,
                        const std::filesystem::path& path) {
  json segs = json::array();
  for (const Segment& s : segments) segs.push_back(segment_to_json(s, false));
  json j{{"threshold", otsu.threshold}, {"degenerate", otsu.degenerate}, {"segments", segs}};
  write_json_file(j, path);
}

LoadedSegments load_segments_json(const std::filesystem::path& path) {
  json j = read_json_file(path);
  LoadedSegments loaded;
  try {
    loaded.otsu.threshold = j.at("threshold").get<double>();
    loaded.otsu.degenerate = j.at("degenerate").get<bool>();
    for (const json& s : j.at("segments")) loaded.segments.push_back(segment_from_json(s));
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  return loaded;
}

}  // namespace sff
