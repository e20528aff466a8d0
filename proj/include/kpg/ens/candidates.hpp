#pragma once

#include <vector>

#include "kpg/ens/state.hpp"

namespace kpg {

enum class CandidateTag { kLocal, kGlobal };

/// Both candidate sets, ascending by node id, excluding nodes already in g_t:
///   local  = children (in G) of key-graph nodes
///   global = every node of G outside the key graph
struct CandidateSets {
  std::vector<int> local;
  std::vector<int> global;
};

struct CandidateChoice {
  std::vector<int> nodes;
  CandidateTag tag = CandidateTag::kLocal;
};

CandidateSets candidate_sets(const KeyGraphState& key, const CandidateGraph& pool);

/// Picks the preferred set, falling back to the other when it is empty.
CandidateChoice choose_candidates(CandidateSets sets, bool prefer_local);

/// Local with probability epsilon, global otherwise, then the empty-set fallback.
/// Throws InputError unless epsilon is in [0, 1].
CandidateChoice build_candidate_set(const KeyGraphState& key, const CandidateGraph& pool,
                                    double epsilon, Rng& rng);

/// Adds `node` to the key graph under its true parent when that parent is
/// already selected, otherwise under the root. Throws InputError if `node` is
/// already in the key graph.
KeyGraphState apply_action(const KeyGraphState& key, int node, const CandidateGraph& pool);

}  // namespace kpg
