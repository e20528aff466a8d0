#pragma once

#include "kpg/nn/tensor.hpp"

namespace kpg {

inline constexpr double kProbabilityFloor = 1e-12;

/// Numerically stable softmax (max subtraction).
RowVector softmax(const RowVector& x);

/// -ln max(p[target], 1e-12). Throws InputError for an out-of-range target.
double cross_entropy(const RowVector& p, int target);

/// Gradient of cross_entropy(softmax(logits), target) w.r.t. the logits.
RowVector softmax_cross_entropy_grad(const RowVector& p, int target);

Tensor2 relu(const Tensor2& x);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Index of the largest entry; ties resolve to the lowest index.
Index argmax(const RowVector& x);

}  // namespace kpg
