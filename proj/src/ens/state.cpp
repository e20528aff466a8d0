#include "kpg/ens/state.hpp"

#include "kpg/errors.hpp"

namespace kpg {

CandidateGraph CandidateGraph::from_tree(const PropagationTree& tree) {
  if (tree.features.rows() != static_cast<Index>(tree.size())) {
    throw InputError("candidate graph: tree '" + tree.event_id + "' is not featurized");
  }
  CandidateGraph g;
  const auto n = tree.size();
  g.parent = tree.parent;
  g.children.assign(n, {});
  g.features.reserve(n);
  g.tokens.reserve(n);
  g.generated.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.parent[i] >= 0) g.children[static_cast<std::size_t>(tree.parent[i])].push_back(static_cast<int>(i));
    g.features.emplace_back(tree.features.row(static_cast<Index>(i)));
    g.tokens.push_back(tree.posts[i].tokens);
  }
  return g;
}

int CandidateGraph::add_generated(int context, std::vector<int> response_tokens, RowVector row) {
  if (context < 0 || context >= size()) throw InputError("add_generated: context out of range");
  const int id = size();
  parent.push_back(context);
  children.emplace_back();
  children[static_cast<std::size_t>(context)].push_back(id);
  features.push_back(std::move(row));
  tokens.push_back(std::move(response_tokens));
  generated.push_back(true);
  return id;
}

KeyGraphState KeyGraphState::initial(const CandidateGraph& candidates) {
  KeyGraphState s;
  s.nodes = {0};
  s.graph.parent = {-1};
  s.graph.features = candidates.features.front();
  s.position_of.assign(static_cast<std::size_t>(candidates.size()), -1);
  s.position_of[0] = 0;
  return s;
}

int KeyGraphState::position(int node) const {
  if (node < 0 || node >= static_cast<int>(position_of.size())) return -1;
  return position_of[static_cast<std::size_t>(node)];
}

}  // namespace kpg
