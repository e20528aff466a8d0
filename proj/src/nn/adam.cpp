#include "kpg/nn/adam.hpp"

#include <cmath>

namespace kpg {

void adam_update(BlockParams& params, const AdamOptions& o) {
  const double k = static_cast<double>(params.step);
  const double lr = o.learning_rate / (1.0 + o.decay * k);
  const double t = k + 1.0;
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (auto& p : params.all()) {
    p.m = o.beta1 * p.m + (1.0 - o.beta1) * p.grad;
    p.v = o.beta2 * p.v + (1.0 - o.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= lr * (p.m.array() / c1) / ((p.v.array() / c2).sqrt() + o.eps);
    p.grad.setZero();
  }
  ++params.step;
}

void adam_update(BlockParams& params, double learning_rate, double decay) {
  AdamOptions o;
  o.learning_rate = learning_rate;
  o.decay = decay;
  adam_update(params, o);
}

void adam_update(std::span<BlockParams* const> blocks, const AdamOptions& options) {
  for (auto* b : blocks) adam_update(*b, options);
}

void zero_grad(std::span<BlockParams* const> blocks) {
  for (auto* b : blocks) b->zero_grad();
}

void scale_grad(std::span<BlockParams* const> blocks, double factor) {
  for (auto* b : blocks) {
    for (auto& p : b->all()) p.grad *= factor;
  }
}

}  // namespace kpg
