#include "kpg/nn/functional.hpp"

#include <algorithm>
#include <cmath>

#include "kpg/errors.hpp"

namespace kpg {

RowVector softmax(const RowVector& x) {
  RowVector e = (x.array() - x.maxCoeff()).exp();
  return e / e.sum();
}

double cross_entropy(const RowVector& p, int target) {
  if (target < 0 || target >= p.size()) {
    throw InputError("cross_entropy: target " + std::to_string(target) + " outside [0, " +
                     std::to_string(p.size()) + ")");
  }
  return -std::log(std::max(p(target), kProbabilityFloor));
}

RowVector softmax_cross_entropy_grad(const RowVector& p, int target) {
  RowVector g = p;
  g(target) -= 1.0;
  return g;
}

Tensor2 relu(const Tensor2& x) { return x.cwiseMax(0.0); }

Index argmax(const RowVector& x) {
  Index best = 0;
  for (Index i = 1; i < x.size(); ++i) {
    if (x(i) > x(best)) best = i;
  }
  return best;
}

}  // namespace kpg
