#pragma once

#include <vector>

#include "kpg/classifier/bigcn.hpp"
#include "kpg/crg/crg_model.hpp"
#include "kpg/ens/candidates.hpp"
#include "kpg/ens/ens_model.hpp"
#include "kpg/ens/state.hpp"
#include "kpg/graph/tree.hpp"
#include "kpg/graph/vocab.hpp"
#include "kpg/pipeline/config.hpp"

namespace kpg {

struct EpisodeOptions {
  int max_steps = 0;
  double epsilon = 0.8;
  /// Minimum candidate-set size before the generator tops it up.
  int gamma = 5;
  int rollout_l = 10;
  int max_decode_len = 12;
  /// Uniform choice among out-neighbors instead of the learned selector.
  bool random_selection = false;
  /// Every reward and penalty fixed to 1.
  bool unit_rewards = false;
  EnsLossOptions loss;
};

EpisodeOptions episode_options(const ExperimentConfig& config, int max_steps);

struct StepRecord {
  int node = -1;
  CandidateTag tag = CandidateTag::kLocal;
  int candidates = 0;
  int generated_before = 0;  // responses generated for this step's candidate set
  double reward = 1.0;
  double penalty = 1.0;
  double rollout = 0.0;
  double loss = 0.0;
};

struct Episode {
  CandidateGraph pool;
  KeyGraphState key;
  std::vector<StepRecord> steps;
  int generated = 0;
  double loss = 0.0;
};

/// Builds a key graph with the selector acting greedily (or uniformly when
/// random_selection is set). `crg` may be null to disable generation.
Episode generate_key_graph(const EnsModel& ens, const CrgModel* crg, const Vocabulary& vocab,
                           const PropagationTree& tree, const EpisodeOptions& options, Rng& rng);

/// Training episode: actions are sampled from the policy and the per-step
/// loss is back-propagated into `ens` (gradients accumulate; no update).
/// `reward_model` stays frozen.
Episode train_episode(EnsModel& ens, const BiGcn& reward_model, const CrgModel* crg,
                      const Vocabulary& vocab, const PropagationTree& tree,
                      const EpisodeOptions& options, Rng& rng);

/// Key graphs of the root alone, as a graph, for the no-step case.
Graph root_only_graph(const PropagationTree& tree);

}  // namespace kpg
