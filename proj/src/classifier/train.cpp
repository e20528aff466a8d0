#include "kpg/classifier/train.hpp"

#include <algorithm>
#include <numeric>

#include "kpg/errors.hpp"
#include "kpg/nn/functional.hpp"

namespace kpg {

namespace {

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
};

Evaluation evaluate(const BiGcn& model, std::span<const Graph> graphs, std::span<const int> labels) {
  Evaluation e;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const RowVector p = model.forward(graphs[i]);
    e.loss += cross_entropy(p, labels[i]);
    if (argmax(p) == labels[i]) e.accuracy += 1.0;
  }
  e.accuracy /= static_cast<double>(graphs.size());
  e.loss /= static_cast<double>(graphs.size());
  return e;
}

}  // namespace

ClassifierTrainResult train_classifier(BiGcn& model, std::span<const Graph> graphs,
                                       std::span<const int> labels,
                                       std::span<const Graph> val_graphs,
                                       std::span<const int> val_labels,
                                       const ClassifierTrainOptions& o) {
  if (graphs.empty()) throw InputError("train_classifier: empty training set");
  if (graphs.size() != labels.size() || val_graphs.size() != val_labels.size()) {
    throw InputError("train_classifier: graph/label count mismatch");
  }
  ClassifierTrainResult result;
  Rng rng(o.seed);
  std::vector<std::size_t> order(graphs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto blocks = model.blocks();
  zero_grad(blocks);

  const bool validate = !val_graphs.empty();
  BiGcn best = model;
  Evaluation best_eval{-1.0, 0.0};
  int since_best = 0;

  for (int epoch = 0; epoch < o.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(o.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(o.batch));
      const double w = 1.0 / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        total += model.loss_backward(graphs[order[k]], labels[order[k]], w);
      }
      adam_update(blocks, o.adam);
    }
    result.loss_curve.push_back(total / static_cast<double>(order.size()));

    if (!validate) continue;
    const Evaluation ev = evaluate(model, val_graphs, val_labels);
    result.val_accuracy.push_back(ev.accuracy);
    const bool better = ev.accuracy > best_eval.accuracy ||
                        (ev.accuracy == best_eval.accuracy && ev.loss < best_eval.loss);
    if (better) {
      best_eval = ev;
      best = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= o.patience) {
      break;
    }
  }

  if (validate) {
    model = std::move(best);
    result.best_val_accuracy = best_eval.accuracy;
  } else {
    result.best_epoch = o.max_epochs - 1;
  }
  return result;
}

std::vector<int> predict_all(const BiGcn& model, std::span<const Graph> graphs) {
  std::vector<int> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(model.predict(g));
  return out;
}

}  // namespace kpg
