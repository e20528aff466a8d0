#include "kpg/ens/candidates.hpp"

#include "kpg/errors.hpp"

namespace kpg {

CandidateSets candidate_sets(const KeyGraphState& key, const CandidateGraph& pool) {
  CandidateSets s;
  for (int v = 0; v < pool.size(); ++v) {
    if (key.contains(v)) continue;
    s.global.push_back(v);
    const int p = pool.parent[static_cast<std::size_t>(v)];
    if (p >= 0 && key.contains(p)) s.local.push_back(v);
  }
  return s;
}

CandidateChoice choose_candidates(CandidateSets sets, bool prefer_local) {
  CandidateChoice c;
  const bool use_local = prefer_local ? !sets.local.empty() : sets.global.empty();
  if (use_local) {
    c.nodes = std::move(sets.local);
    c.tag = CandidateTag::kLocal;
  } else {
    c.nodes = std::move(sets.global);
    c.tag = CandidateTag::kGlobal;
  }
  return c;
}

CandidateChoice build_candidate_set(const KeyGraphState& key, const CandidateGraph& pool,
                                    double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InputError("epsilon must lie in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool local = unit(rng) < epsilon;
  return choose_candidates(candidate_sets(key, pool), local);
}

KeyGraphState apply_action(const KeyGraphState& key, int node, const CandidateGraph& pool) {
  if (node < 0 || node >= pool.size()) throw InputError("apply_action: node out of range");
  if (key.contains(node)) {
    throw InputError("apply_action: node " + std::to_string(node) + " is already selected");
  }
  KeyGraphState next = key;
  const int parent_pos = key.position(pool.parent[static_cast<std::size_t>(node)]);
  const int pos = next.size();
  next.nodes.push_back(node);
  next.graph.parent.push_back(parent_pos >= 0 ? parent_pos : 0);
  next.graph.features.conservativeResize(pos + 1, Eigen::NoChange);
  next.graph.features.row(pos) = pool.features[static_cast<std::size_t>(node)];
  if (next.position_of.size() < static_cast<std::size_t>(pool.size())) {
    next.position_of.resize(static_cast<std::size_t>(pool.size()), -1);
  }
  next.position_of[static_cast<std::size_t>(node)] = pos;
  ++next.step;
  return next;
}

}  // namespace kpg
