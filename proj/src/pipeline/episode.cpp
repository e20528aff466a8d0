#include "kpg/pipeline/episode.hpp"

#include <algorithm>
#include <random>

#include "kpg/ens/rollout.hpp"

namespace kpg {

EpisodeOptions episode_options(const ExperimentConfig& config, int max_steps) {
  EpisodeOptions o;
  o.max_steps = max_steps;
  o.epsilon = config.epsilon;
  o.gamma = config.gamma;
  o.rollout_l = config.rollout_l;
  o.max_decode_len = config.max_decode_len;
  o.random_selection = config.ablation == Ablation::kNoEns;
  o.unit_rewards = config.force_unit_rewards || config.ablation == Ablation::kNoReward;
  o.loss.variant = config.ens_loss;
  o.loss.ce_weight = config.ens_ce_weight;
  o.loss.pg_weight = config.ens_pg_weight;
  return o;
}

Graph root_only_graph(const PropagationTree& tree) {
  Graph g;
  g.parent = {-1};
  g.features = tree.features.topRows(1);
  return g;
}

namespace {

Episode run(const EnsModel& ens, EnsModel* learner, const BiGcn* reward_model,
            const CrgModel* crg, const Vocabulary& vocab, const PropagationTree& tree,
            const EpisodeOptions& o, Rng& rng) {
  Episode ep;
  ep.pool = CandidateGraph::from_tree(tree);
  ep.key = KeyGraphState::initial(ep.pool);
  const bool need_rewards = learner != nullptr && !o.unit_rewards;
  double r_prev = need_rewards ? reward_model->forward(ep.key.graph)(tree.label) : 0.0;
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  for (int t = 0; t < o.max_steps; ++t) {
    // The no-selector variant always walks out-neighbors.
    const bool prefer_local = o.random_selection || coin(rng) < o.epsilon;
    CandidateChoice choice = choose_candidates(candidate_sets(ep.key, ep.pool), prefer_local);
    StepRecord step;
    if (crg != nullptr && static_cast<int>(choice.nodes.size()) < o.gamma) {
      step.generated_before = o.gamma - static_cast<int>(choice.nodes.size());
      generate_responses(ep.pool, ep.key, *crg, vocab, step.generated_before, o.max_decode_len,
                         rng);
      ep.generated += step.generated_before;
      choice = choose_candidates(candidate_sets(ep.key, ep.pool), prefer_local);
    }
    if (choice.nodes.empty()) break;
    step.tag = choice.tag;
    step.candidates = static_cast<int>(choice.nodes.size());

    int v = -1;
    if (o.random_selection) {
      std::uniform_int_distribution<std::size_t> pick(0, choice.nodes.size() - 1);
      v = choice.nodes[pick(rng)];
    } else {
      const Tensor2 h = ens.encode(ep.key.graph);
      const ActionDistribution dist = ens.action_distribution(ep.key, h, choice, ep.pool);
      v = learner != nullptr ? sample_action(dist, rng) : greedy_action(dist);
    }
    step.node = v;
    KeyGraphState next = apply_action(ep.key, v, ep.pool);

    if (learner != nullptr && !o.random_selection) {
      if (need_rewards) {
        const RolloutResult roll =
            rollout_score(*reward_model, ens, next, ep.pool, o.rollout_l, tree.label);
        step.rollout = roll.score;
        step.reward = reward_ens(roll.score, r_prev);
        step.penalty = penalty_ens(roll.future_scores.front());
        r_prev = roll.score;
      }
      const auto chosen = static_cast<std::size_t>(
          std::find(choice.nodes.begin(), choice.nodes.end(), v) - choice.nodes.begin());
      step.loss = learner->loss_backward(ep.key, choice, chosen, next, ep.pool, step.reward,
                                         step.penalty, tree.label, o.loss)
                      .total;
      ep.loss += step.loss;
    }
    ep.key = std::move(next);
    ep.steps.push_back(step);
  }
  return ep;
}

}  // namespace

Episode generate_key_graph(const EnsModel& ens, const CrgModel* crg, const Vocabulary& vocab,
                           const PropagationTree& tree, const EpisodeOptions& options, Rng& rng) {
  return run(ens, nullptr, nullptr, crg, vocab, tree, options, rng);
}

Episode train_episode(EnsModel& ens, const BiGcn& reward_model, const CrgModel* crg,
                      const Vocabulary& vocab, const PropagationTree& tree,
                      const EpisodeOptions& options, Rng& rng) {
  return run(ens, &ens, &reward_model, crg, vocab, tree, options, rng);
}

}  // namespace kpg
