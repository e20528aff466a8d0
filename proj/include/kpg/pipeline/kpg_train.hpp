#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kpg/classifier/bigcn.hpp"
#include "kpg/crg/crg_model.hpp"
#include "kpg/ens/ens_model.hpp"
#include "kpg/graph/tree.hpp"
#include "kpg/graph/vocab.hpp"
#include "kpg/pipeline/config.hpp"
#include "kpg/pipeline/episode.hpp"

namespace kpg {

/// The two learned components of the key-graph generator.
struct KpgModels {
  EnsModel ens;
  CrgModel crg;
  bool use_crg = true;

  KpgModels() = default;
  KpgModels(Index features, Index vocab, const ExperimentConfig& config, Index classes);

  void init(Rng& rng);
  const CrgModel* generator() const { return use_crg ? &crg : nullptr; }
};

struct KpgEpochLog {
  int epoch = 0;
  double ens_loss = 0.0;
  double crg_loss = 0.0;
  double mean_step_reward = 0.0;
  double mean_crg_reward = 0.0;
  int steps = 0;
  int generated = 0;
  double val_accuracy = 0.0;
};

struct KpgTrainResult {
  std::vector<KpgEpochLog> epochs;
  /// Summed generator loss per warm-up pass.
  std::vector<double> warmup_loss;
  /// Event ids per batch, in processing order (identical every epoch).
  std::vector<std::vector<std::string>> batches;
  int best_epoch = -1;
  double best_val_accuracy = 0.0;
};

/// Round(tau * median size) or, in average mode, round(mean size). Zero when
/// tau is zero, otherwise at least one.
int max_steps(std::span<const PropagationTree> trees, double tau, TauMode mode);

/// Alternating optimization: each epoch walks the events largest-first in
/// batches, first updating the selector with the generator frozen, then the
/// generator on the latest key graphs with the selector frozen. Early-stops
/// on the frozen classifier's accuracy over validation key graphs and keeps
/// the best models. Trees must be featurized with `vocab`.
KpgTrainResult train_kpg(KpgModels& models, const BiGcn& reward_model,
                         std::span<const PropagationTree> train,
                         std::span<const PropagationTree> val, const Vocabulary& vocab,
                         const ExperimentConfig& config, int steps, std::uint64_t seed);

/// Per-event RNG for inference, independent of processing order.
Rng event_rng(std::uint64_t seed, const std::string& event_id);

/// Greedy key graphs for a set of trees.
std::vector<Episode> generate_key_graphs(const KpgModels& models,
                                         std::span<const PropagationTree> trees,
                                         const Vocabulary& vocab, const EpisodeOptions& options,
                                         std::uint64_t seed);

/// Hash of every parameter value, for checking that a model stayed frozen.
std::string parameter_hash(std::span<const BlockParams* const> blocks);

}  // namespace kpg
