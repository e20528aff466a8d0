#include "kpg/classifier/metrics.hpp"

#include "kpg/errors.hpp"

namespace kpg {

Metrics evaluate_metrics(std::span<const int> predictions, std::span<const int> labels,
                         int classes) {
  if (predictions.empty()) throw InputError("evaluate_metrics: no predictions");
  if (predictions.size() != labels.size()) {
    throw InputError("evaluate_metrics: predictions and labels differ in length");
  }
  std::vector<double> tp(classes, 0.0), fp(classes, 0.0), fn(classes, 0.0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i];
    const int y = labels[i];
    if (p < 0 || p >= classes || y < 0 || y >= classes) {
      throw InputError("evaluate_metrics: class index out of range");
    }
    if (p == y) {
      ++correct;
      tp[y] += 1.0;
    } else {
      fp[p] += 1.0;
      fn[y] += 1.0;
    }
  }
  Metrics m;
  m.count = labels.size();
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.count);
  for (int c = 0; c < classes; ++c) {
    const double precision = tp[c] + fp[c] > 0 ? tp[c] / (tp[c] + fp[c]) : 0.0;
    const double recall = tp[c] + fn[c] > 0 ? tp[c] / (tp[c] + fn[c]) : 0.0;
    m.f1_per_class.push_back(precision + recall > 0 ? 2 * precision * recall / (precision + recall)
                                                    : 0.0);
  }
  return m;
}

}  // namespace kpg
