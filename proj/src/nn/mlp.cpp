#include "kpg/nn/mlp.hpp"

#include "kpg/errors.hpp"

namespace kpg {

Mlp::Mlp(const std::string& name, std::span<const Index> widths, Activation activation)
    : name_(name), activation_(activation) {
  if (widths.size() < 2) throw DimensionError("mlp '" + name + "' needs at least two widths");
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    layers_.emplace_back(name + "." + std::to_string(i), widths[i], widths[i + 1]);
  }
}

Tensor2 Mlp::forward(const Tensor2& x, Cache* cache) const {
  if (cache) {
    cache->layers.assign(layers_.size(), {});
    cache->pre_activations.assign(layers_.size(), {});
  }
  Tensor2 h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Tensor2 pre = layers_[i].forward(h, cache ? &cache->layers[i] : nullptr);
    if (i + 1 < layers_.size()) {
      h = activation_ == Activation::tanh ? Tensor2(pre.array().tanh()) : Tensor2(pre.cwiseMax(0.0));
      if (cache) cache->pre_activations[i] = std::move(pre);
    } else {
      h = std::move(pre);
    }
  }
  return h;
}

Tensor2 Mlp::backward(const Cache& cache, const Tensor2& dy) {
  Tensor2 grad = dy;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    if (k + 1 < layers_.size()) {
      const auto& pre = cache.pre_activations[k];
      if (activation_ == Activation::tanh) {
        grad = (grad.array() * (1.0 - pre.array().tanh().square())).matrix();
      } else {
        grad = (pre.array() > 0.0).select(grad, 0.0);
      }
    }
    grad = layers_[k].backward(cache.layers[k], grad);
  }
  return grad;
}

void Mlp::init_glorot(Rng& rng) {
  for (auto& l : layers_) l.init_glorot(rng);
}

std::vector<BlockParams*> Mlp::blocks() {
  std::vector<BlockParams*> out;
  for (auto& l : layers_) out.push_back(&l.params());
  return out;
}

}  // namespace kpg
