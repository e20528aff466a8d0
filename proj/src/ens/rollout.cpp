#include "kpg/ens/rollout.hpp"

#include <cmath>
#include <numeric>

#include "kpg/errors.hpp"

namespace kpg {

double blend_rollout(double current, std::span<const double> future) {
  if (future.empty()) throw InputError("blend_rollout: no future scores");
  const double mean =
      std::accumulate(future.begin(), future.end(), 0.0) / static_cast<double>(future.size());
  return 0.5 * (current + mean);
}

RolloutResult rollout_score(const BiGcn& reward_model, const EnsModel& ens,
                            const KeyGraphState& next, const CandidateGraph& pool, int l,
                            int label) {
  RolloutResult r;
  const double current = reward_model.forward(next.graph)(label);
  r.future_scores.push_back(current);
  KeyGraphState scratch = next;
  for (int i = 1; i < l; ++i) {
    CandidateChoice choice = choose_candidates(candidate_sets(scratch, pool), true);
    if (choice.nodes.empty()) break;
    const Tensor2 h = ens.encode(scratch.graph);
    const int v = greedy_action(ens.action_distribution(scratch, h, choice, pool));
    scratch = apply_action(scratch, v, pool);
    r.future_scores.push_back(reward_model.forward(scratch.graph)(label));
  }
  r.score = blend_rollout(current, r.future_scores);
  return r;
}

double reward_ens(double r_next, double r_prev) { return std::exp(-(r_next - r_prev)); }

double penalty_ens(double true_class_score) { return 1.5 - true_class_score; }

}  // namespace kpg
