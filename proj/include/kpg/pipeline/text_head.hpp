#pragma once

#include <span>
#include <vector>

#include "kpg/classifier/train.hpp"
#include "kpg/graph/tree.hpp"
#include "kpg/graph/vocab.hpp"
#include "kpg/nn/dense.hpp"

namespace kpg {

/// Bag-of-words logistic regression over the TF-IDF of every post in an event.
class TextHead {
 public:
  TextHead() = default;
  TextHead(Index features, Index classes);

  void init(Rng& rng);
  RowVector forward(const RowVector& bag) const;
  double loss_backward(const RowVector& bag, int label);

  std::vector<BlockParams*> blocks() { return {&dense_.params()}; }
  std::vector<const BlockParams*> blocks() const { return {&dense_.params()}; }

 private:
  Dense dense_;
};

/// TF-IDF row of all tokens of a (featurized) tree.
RowVector event_bag(const PropagationTree& tree, const Vocabulary& vocab);

/// Early-stopped minibatch Adam, like the graph classifier.
void train_text_head(TextHead& head, std::span<const RowVector> bags, std::span<const int> labels,
                     std::span<const RowVector> val_bags, std::span<const int> val_labels,
                     const ClassifierTrainOptions& options);

/// Mean of the two distributions, renormalized. Throws InputError when the
/// class counts differ.
RowVector fuse_predictions(const RowVector& graph_probs, const RowVector& text_probs);

}  // namespace kpg
