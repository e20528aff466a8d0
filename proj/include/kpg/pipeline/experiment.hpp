#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpg/classifier/bigcn.hpp"
#include "kpg/classifier/metrics.hpp"
#include "kpg/graph/dataset.hpp"
#include "kpg/graph/tree.hpp"
#include "kpg/graph/vocab.hpp"
#include "kpg/pipeline/config.hpp"
#include "kpg/pipeline/kpg_train.hpp"
#include "kpg/pipeline/text_head.hpp"

namespace kpg {

/// Everything learned for one fold; enough to label new events.
struct TrainedFold {
  Vocabulary vocab;
  int classes = 2;
  int steps = 0;
  BiGcn reward_model;
  KpgModels kpg;
  BiGcn downstream;
  bool has_text = false;
  TextHead text;
};

struct FoldReport {
  int fold = 0;
  Metrics kpg;
  std::map<std::string, Metrics> baselines;
  double wall_time_s = 0.0;
  /// Selection steps taken while building the test events' key graphs.
  long long steps = 0;
  int max_steps = 0;
  int kpg_epochs = 0;
  double mean_key_graph_size = 0.0;
  std::vector<std::string> event_ids;
  std::vector<int> labels;
  std::vector<int> predictions;
  std::map<std::string, std::vector<int>> baseline_predictions;
};

struct ExperimentReport {
  std::string config_hash;
  std::string dataset_hash;
  int classes = 2;
  std::vector<FoldReport> folds;
  /// Pooled over every test prediction of every fold.
  Metrics aggregate;
  std::map<std::string, Metrics> aggregate_baselines;
  double wall_time_s = 0.0;
  long long steps = 0;
};

int class_count(std::span<const PropagationTree> trees);

/// FNV-1a over the canonical serialization of every event.
std::string dataset_hash(std::span<const PropagationTree> trees);

/// Splits `trees` into (train, validation) index lists, stratified by label,
/// with round(val_fraction * n) of each class (at least one when the class has
/// two or more events) held out.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(
    std::span<const PropagationTree> trees, double val_fraction, std::uint64_t seed);

/// Trains every model on `train` (raw, unfeaturized) and labels `test`.
FoldReport run_fold(std::span<const PropagationTree> train, std::span<const PropagationTree> test,
                    const ExperimentConfig& config, int fold, std::uint64_t seed,
                    TrainedFold* keep = nullptr, int classes = 0);

/// K-fold cross-validation. When `keep_fold` is set, that fold's models are
/// written to `kept`.
ExperimentReport run_experiment(std::span<const PropagationTree> trees,
                                const ExperimentConfig& config,
                                std::optional<int> keep_fold = std::nullopt,
                                TrainedFold* kept = nullptr);

/// Labels raw events with a trained fold. Returns predictions.
struct Labelled {
  std::vector<int> predictions;
  std::vector<Episode> episodes;
};
Labelled label_events(const TrainedFold& fold, std::span<const PropagationTree> trees,
                      const ExperimentConfig& config);

}  // namespace kpg
