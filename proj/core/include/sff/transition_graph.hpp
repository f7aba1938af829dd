#pragma once

#include <filesystem>
#include <vector>

#include "sff/cost_table.hpp"
#include "sff/segmentation.hpp"
#include "sff/semantic.hpp"

namespace sff {

struct GraphConfig {
  int tau_max = 100;  // maximum forward skip in frames
  int tau_b = 10;     // source/sink fan width at segment borders
  double lambda_i = 1.0;
  double lambda_v = 1.0;
  double lambda_a = 1.0;
  double lambda_s = 1.5;
  double epsilon = 1.0;  // semantic-term stabilizer

  void validate() const;  // throws invalid_config
};

/// Semantic transition cost: 1 / (S_i + S_j + epsilon).
double semantic_cost(double s_i, double s_j, double epsilon);

/// Transition weight: the lambda-weighted cost sum scaled by
/// ceil((j - i) / F).
double edge_weight(int i, int j, const PairCosts& costs, double semantic_term,
                   const GraphConfig& cfg, int speedup);

struct GraphEdge {
  int from = 0;  // node ids; source/sink use dedicated ids
  int to = 0;
  double weight = 0.0;
};

/// Weighted DAG over one segment's frames plus virtual source/sink.
/// Node ids are segment-local: 0..len-1 map to frames start..end,
/// source() and sink() are the virtual endpoints.
struct TransitionGraph {
  int start = 0;  // original index of node 0
  int length = 0;
  int segment_speedup = 1;
  std::vector<GraphEdge> edges;  // sorted by (from, to), strictly forward

  int source() const { return -1; }
  int sink() const { return length; }
  int original_index(int node) const { return start + node; }
};

TransitionGraph build_segment_graph(const Segment& segment, const SemanticProfile& profile,
                                    const CostFn& costs, const GraphConfig& cfg);

/// Minimum-weight source->sink path; ties break toward fewer hops, then
/// the lexicographically smallest node sequence. Returns interior nodes
/// only (source/sink stripped). Throws unreachable (defensive; cannot
/// trigger on graphs satisfying the invariants).
std::vector<int> bellman_ford(const TransitionGraph& graph);

struct SegmentPath {
  Segment segment;
  std::vector<int> path;  // original frame indices
};

struct SamplingResult {
  std::vector<int> selected;  // original frame indices, strictly increasing
  std::vector<SegmentPath> per_segment;
  double achieved_speedup = 0.0;
};

/// Per-segment shortest paths concatenated in timeline order.
SamplingResult sample_video(int n_frames, const std::vector<Segment>& segments,
                            const SemanticProfile& profile, const CostFn& costs,
                            const GraphConfig& cfg, int jobs = 0);

void save_selected(const SamplingResult& result, const std::filesystem::path& path);
std::vector<int> load_selected(const std::filesystem::path& path);
void save_sampling_json(const SamplingResult& result, const std::filesystem::path& path);

}  // namespace sff
