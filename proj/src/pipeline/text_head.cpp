#include "kpg/pipeline/text_head.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "kpg/errors.hpp"
#include "kpg/nn/adam.hpp"
#include "kpg/nn/functional.hpp"

namespace kpg {

TextHead::TextHead(Index features, Index classes) : dense_("text_head", features, classes) {}

void TextHead::init(Rng& rng) { dense_.init_glorot(rng); }

RowVector TextHead::forward(const RowVector& bag) const {
  return softmax(RowVector(dense_.forward(bag).row(0)));
}

double TextHead::loss_backward(const RowVector& bag, int label) {
  Dense::Cache cache;
  const RowVector logits = dense_.forward(bag, &cache).row(0);
  const RowVector p = softmax(logits);
  const double loss = cross_entropy(p, label);
  dense_.backward(cache, softmax_cross_entropy_grad(p, label));
  return loss;
}

RowVector event_bag(const PropagationTree& tree, const Vocabulary& vocab) {
  std::vector<int> all;
  for (const auto& post : tree.posts) all.insert(all.end(), post.tokens.begin(), post.tokens.end());
  return tfidf_row(all, vocab);
}

void train_text_head(TextHead& head, std::span<const RowVector> bags, std::span<const int> labels,
                     std::span<const RowVector> val_bags, std::span<const int> val_labels,
                     const ClassifierTrainOptions& options) {
  if (bags.size() != labels.size() || val_bags.size() != val_labels.size()) {
    throw InputError("train_text_head: bags and labels differ in length");
  }
  Rng rng(options.seed);
  std::vector<std::size_t> order(bags.size());
  std::iota(order.begin(), order.end(), 0);
  auto val_score = [&] {
    int correct = 0;
    for (std::size_t i = 0; i < val_bags.size(); ++i) {
      correct += argmax(head.forward(val_bags[i])) == val_labels[i];
    }
    return val_bags.empty() ? 0.0 : static_cast<double>(correct) / val_bags.size();
  };
  auto blocks = head.blocks();
  std::vector<BlockParams> best;
  double best_acc = -1.0;
  int stale = 0;
  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(options.batch)) {
      const std::size_t end = std::min(order.size(), start + options.batch);
      for (std::size_t i = start; i < end; ++i) {
        head.loss_backward(bags[order[i]], labels[order[i]]);
      }
      scale_grad(blocks, 1.0 / static_cast<double>(end - start));
      adam_update(blocks, options.adam);
    }
    if (val_bags.empty()) continue;
    const double acc = val_score();
    if (acc > best_acc) {
      best_acc = acc;
      stale = 0;
      best.clear();
      for (auto* b : blocks) best.push_back(*b);
    } else if (++stale >= options.patience) {
      break;
    }
  }
  if (!best.empty()) {
    for (std::size_t i = 0; i < blocks.size(); ++i) *blocks[i] = best[i];
  }
}

RowVector fuse_predictions(const RowVector& graph_probs, const RowVector& text_probs) {
  if (graph_probs.size() != text_probs.size()) {
    throw InputError("fuse_predictions: class counts differ (" +
                     std::to_string(graph_probs.size()) + " vs " +
                     std::to_string(text_probs.size()) + ")");
  }
  RowVector fused = 0.5 * (graph_probs + text_probs);
  const double total = fused.sum();
  if (total > 0.0) fused /= total;
  return fused;
}

}  // namespace kpg
