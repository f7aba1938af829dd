#include "sff/transition_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "sff/parallel.hpp"

namespace sff {

void GraphConfig::validate() const {
  if (tau_max < 1) throw Error(Errc::invalid_config, "tau_max must be >= 1");
  if (tau_b < 1) throw Error(Errc::invalid_config, "tau_b must be >= 1");
  if (lambda_i < 0 || lambda_v < 0 || lambda_a < 0 || lambda_s < 0)
    throw Error(Errc::invalid_config, "lambdas must be non-negative");
  if (epsilon <= 0) throw Error(Errc::invalid_config, "epsilon must be positive");
  // Keeps the jump across a segment border within tau_max.
  if (2 * tau_b - 1 > tau_max)
    throw Error(Errc::invalid_config, "tau_b too large for tau_max (need 2*tau_b-1 <= tau_max)");
}

double semantic_cost(double s_i, double s_j, double epsilon) {
  if (s_i < 0 || s_j < 0) throw Error(Errc::invalid_argument, "semantic scores must be >= 0");
  if (epsilon <= 0) throw Error(Errc::invalid_argument, "epsilon must be positive");
  return 1.0 / (s_i + s_j + epsilon);
}

double edge_weight(int i, int j, const PairCosts& costs, double semantic_term,
                   const GraphConfig& cfg, int speedup) {
  if (i >= j) throw Error(Errc::invalid_argument, "edges must move forward");
  if (speedup < 1) throw Error(Errc::invalid_argument, "speed-up must be >= 1");
  double base = cfg.lambda_i * costs.instability + cfg.lambda_v * costs.velocity +
                cfg.lambda_a * costs.appearance + cfg.lambda_s * semantic_term;
  int factor = (j - i + speedup - 1) / speedup;  // ceil((j - i) / F)
  return base * factor;
}

TransitionGraph build_segment_graph(const Segment& segment, const SemanticProfile& profile,
                                    const CostFn& costs, const GraphConfig& cfg) {
  cfg.validate();
  if (segment.start > segment.end) throw Error(Errc::invalid_argument, "empty segment");
  if (segment.speedup < 1)
    throw Error(Errc::invalid_argument, "segment has no assigned speed-up");
  if (segment.end >= profile.size())
    throw Error(Errc::length_mismatch, "segment extends past the profile");

  TransitionGraph g;
  g.start = segment.start;
  g.length = segment.length();
  g.segment_speedup = segment.speedup;

  int fan = std::min(cfg.tau_b, g.length);
  for (int k = 0; k < fan; ++k) g.edges.push_back(GraphEdge{g.source(), k, 0.0});
  for (int i = 0; i < g.length; ++i) {
    int last = std::min(i + cfg.tau_max, g.length - 1);
    for (int j = i + 1; j <= last; ++j) {
      int oi = g.start + i, oj = g.start + j;
      PairCosts c = costs(oi, oj);
      double s = semantic_cost(profile.scores[oi], profile.scores[oj], cfg.epsilon);
      double w = edge_weight(oi, oj, c, s, cfg, segment.speedup);
      if (!std::isfinite(w) || w < 0)
        throw Error(Errc::invalid_argument, "edge weight must be finite and non-negative");
      g.edges.push_back(GraphEdge{i, j, w});
    }
  }
  for (int k = g.length - fan; k < g.length; ++k)
    g.edges.push_back(GraphEdge{k, g.sink(), 0.0});

  std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    if (a.from != b.from) return a.from < b.from;
    return a.to < b.to;
  });
  return g;
}

namespace {

struct NodeState {
  double dist = std::numeric_limits<double>::infinity();
  int hops = std::numeric_limits<int>::max();
  int parent = -2;  // node id, -2 = unset
};

// Candidate paths compared here always have equal weight and hop count,
// so the sequences have equal length and compare element-wise.
std::vector<int> trace_path(const std::vector<NodeState>& state, int node, int offset) {
  std::vector<int> path;
  int cur = node;
  while (true) {
    path.push_back(cur);
    int parent = state[cur + offset].parent;
    if (parent == -2) break;
    cur = parent;
    if (path.size() > state.size() + 1) throw Error(Errc::unreachable, "parent cycle");
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<int> bellman_ford(const TransitionGraph& graph) {
  const int offset = 1;  // node id -1 (source) maps to slot 0
  const int n_nodes = graph.length + 2;
  std::vector<NodeState> state(n_nodes);
  state[graph.source() + offset].dist = 0.0;
  state[graph.source() + offset].hops = 0;

  auto lex_smaller = [&](int via, int to, int incumbent) {
    // Compare candidate path(via) + [to] against the stored path(incumbent).
    std::vector<int> cand = trace_path(state, via, offset);
    cand.push_back(to);
    std::vector<int> cur = trace_path(state, incumbent, offset);
    return std::lexicographical_compare(cand.begin(), cand.end(), cur.begin(), cur.end());
  };

  // Edges are sorted topologically, so this settles in one pass and the
  // second pass just confirms the fixpoint; the round bound stays the
  // classic |V| - 1 for safety.
  for (int round = 0; round < n_nodes; ++round) {
    bool changed = false;
    for (const GraphEdge& e : graph.edges) {
      const NodeState& u = state[e.from + offset];
      if (!std::isfinite(u.dist)) continue;
      NodeState& v = state[e.to + offset];
      double cand_dist = u.dist + e.weight;
      int cand_hops = u.hops + 1;
      bool better = false;
      if (cand_dist < v.dist) {
        better = true;
      } else if (cand_dist == v.dist) {
        if (cand_hops < v.hops)
          better = true;
        else if (cand_hops == v.hops && v.parent != e.from && lex_smaller(e.from, e.to, e.to))
          better = true;
      }
      if (better) {
        v.dist = cand_dist;
        v.hops = cand_hops;
        v.parent = e.from;
        changed = true;
      }
    }
    if (!changed) break;
  }

  if (!std::isfinite(state[graph.sink() + offset].dist))
    throw Error(Errc::unreachable, "sink not reachable from source");

  std::vector<int> path = trace_path(state, graph.sink(), offset);
  // Strip the virtual endpoints.
  std::vector<int> interior(path.begin() + 1, path.end() - 1);
  return interior;
}

SamplingResult sample_video(int n_frames, const std::vector<Segment>& segments,
                            const SemanticProfile& profile, const CostFn& costs,
                            const GraphConfig& cfg, int jobs) {
  if (segments.empty()) throw Error(Errc::invalid_argument, "no segments");
  if (profile.size() != n_frames)
    throw Error(Errc::length_mismatch, "profile length differs from frame count");
  int expect = 0;
  for (const Segment& s : segments) {
    if (s.start != expect) throw Error(Errc::invalid_argument, "segments do not tile the video");
    expect = s.end + 1;
  }
  if (expect != n_frames) throw Error(Errc::invalid_argument, "segments do not cover the video");

  SamplingResult result;
  result.per_segment.resize(segments.size());
  parallel_for(segments.size(), jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      TransitionGraph g = build_segment_graph(segments[k], profile, costs, cfg);
      std::vector<int> local = bellman_ford(g);
      SegmentPath sp;
      sp.segment = segments[k];
      sp.path.reserve(local.size());
      for (int node : local) sp.path.push_back(g.original_index(node));
      result.per_segment[k] = std::move(sp);
    }
  });

  for (const SegmentPath& sp : result.per_segment)
    result.selected.insert(result.selected.end(), sp.path.begin(), sp.path.end());
  if (result.selected.empty()) throw Error(Errc::unreachable, "empty sampling");
  result.achieved_speedup =
      static_cast<double>(n_frames) / static_cast<double>(result.selected.size());
  return result;
}

void save_selected(const SamplingResult& result, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(Errc::io_error, "cannot write " + path.string());
  for (int idx : result.selected) std::fprintf(f, "%d\n", idx);
  std::fclose(f);
}

std::vector<int> load_selected(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::vector<int> selected;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      selected.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw Error(Errc::parse_error, path.string() + ": bad index line '" + line + "'");
    }
  }
  return selected;
}

void save_sampling_json(const SamplingResult& result, const std::filesystem::path& path) {
  nlohmann::json per_segment = nlohmann::json::array();
  for (const SegmentPath& sp : result.per_segment) {
    per_segment.push_back(
        {{"segment",
          {{"start", sp.segment.start},
           {"end", sp.segment.end},
           {"kind", sp.segment.kind == SegmentKind::semantic ? "semantic" : "non_semantic"},
           {"speedup", sp.segment.speedup}}},
         {"path", sp.path}});
  }
  nlohmann::json j{{"selected", result.selected},
                   {"achieved_speedup", result.achieved_speedup},
                   {"per_segment", per_segment}};
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace sff
