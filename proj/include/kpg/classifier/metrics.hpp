#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kpg {

struct Metrics {
  double accuracy = 0.0;
  std::vector<double> f1_per_class;
  std::size_t count = 0;
};

/// Accuracy over all data points and per-class F1 = 2PR / (P + R), which is
/// 0 when P + R = 0. Throws InputError on empty or unequal-length input.
Metrics evaluate_metrics(std::span<const int> predictions, std::span<const int> labels,
                         int classes);

}  // namespace kpg
