#pragma once

#include <span>
#include <vector>

#include "kpg/graph/graph.hpp"
#include "kpg/graph/tree.hpp"

namespace kpg {

/// Pool of selectable nodes for one episode: the original tree plus any
/// generated responses. Node 0 is the root; every node's parent has a smaller
/// id, so the pool stays a tree rooted at 0.
struct CandidateGraph {
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  std::vector<RowVector> features;
  std::vector<std::vector<int>> tokens;
  std::vector<bool> generated;

  static CandidateGraph from_tree(const PropagationTree& tree);

  int size() const { return static_cast<int>(parent.size()); }
  Index feature_width() const { return features.empty() ? 0 : features.front().size(); }

  /// Appends a generated response under `context`; returns its node id.
  int add_generated(int context, std::vector<int> response_tokens, RowVector row);
};

/// The key propagation graph g_t. `nodes[k]` is the candidate-graph id at
/// position k, `graph.parent` holds positions, `graph.features` the rows.
struct KeyGraphState {
  std::vector<int> nodes;
  Graph graph;
  int step = 0;

  /// g_0: the root alone.
  static KeyGraphState initial(const CandidateGraph& candidates);

  int size() const { return static_cast<int>(nodes.size()); }
  bool contains(int node) const { return position(node) >= 0; }
  /// Position of a candidate-graph node inside the key graph, or -1.
  int position(int node) const;

  std::vector<int> position_of;  // candidate id -> position, -1 if absent
};

}  // namespace kpg
