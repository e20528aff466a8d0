#pragma once

#include <span>
#include <vector>

#include "kpg/classifier/bigcn.hpp"
#include "kpg/ens/ens_model.hpp"

namespace kpg {

struct RolloutResult {
  double score = 0.0;
  /// f(g_hat_{t+i})[y] for i = 1..k, with g_hat_{t+1} = g_{t+1}.
  std::vector<double> future_scores;
};

/// 0.5 * (current + mean(future)); future must be non-empty.
double blend_rollout(double current, std::span<const double> future);

/// Look-ahead score of g_{t+1}: extends a scratch copy by up to (l - 1) greedy
/// selections (local set preferred, no generation), scoring each graph with
/// the frozen classifier. Stops early when candidates run out and averages
/// over the graphs it reached. l <= 1 reduces to f(g_{t+1})[y].
RolloutResult rollout_score(const BiGcn& reward_model, const EnsModel& ens,
                            const KeyGraphState& next, const CandidateGraph& pool, int l,
                            int label);

/// exp(-(r_next - r_prev))
double reward_ens(double r_next, double r_prev);

/// 1.5 - f(g_{t+1})[y]
double penalty_ens(double true_class_score);

}  // namespace kpg
