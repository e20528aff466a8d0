#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kpg/classifier/bigcn.hpp"
#include "kpg/nn/adam.hpp"

namespace kpg {

struct ClassifierTrainOptions {
  AdamOptions adam;
  int batch = 128;
  int max_epochs = 200;
  /// Epochs without validation improvement before stopping.
  int patience = 10;
  std::uint64_t seed = 0;
};

struct ClassifierTrainResult {
  std::vector<double> loss_curve;      // mean training loss per epoch
  std::vector<double> val_accuracy;    // empty without a validation set
  int best_epoch = -1;
  double best_val_accuracy = 0.0;
};

/// Minibatch Adam on mean cross-entropy. With a validation set the model is
/// early-stopped on validation accuracy (validation loss breaks ties) and the
/// best parameters are restored; without one it runs max_epochs.
ClassifierTrainResult train_classifier(BiGcn& model, std::span<const Graph> graphs,
                                       std::span<const int> labels,
                                       std::span<const Graph> val_graphs,
                                       std::span<const int> val_labels,
                                       const ClassifierTrainOptions& options);

std::vector<int> predict_all(const BiGcn& model, std::span<const Graph> graphs);

}  // namespace kpg
