#pragma once

#include <span>
#include <string>
#include <vector>

#include "kpg/nn/dense.hpp"

namespace kpg {

/// Stack of dense layers with ReLU (or tanh) between layers and a linear output.
/// `widths` lists every layer boundary: {in, hidden..., out}.
class Mlp {
 public:
  enum class Activation { relu, tanh };

  struct Cache {
    std::vector<Dense::Cache> layers;
    std::vector<Tensor2> pre_activations;
  };

  Mlp() = default;
  Mlp(const std::string& name, std::span<const Index> widths,
      Activation activation = Activation::relu);
  Mlp(const std::string& name, std::initializer_list<Index> widths,
      Activation activation = Activation::relu)
      : Mlp(name, std::span<const Index>(widths.begin(), widths.size()), activation) {}

  Index in_width() const { return layers_.front().in_width(); }
  Index out_width() const { return layers_.back().out_width(); }
  Activation activation() const { return activation_; }

  Tensor2 forward(const Tensor2& x, Cache* cache = nullptr) const;
  Tensor2 backward(const Cache& cache, const Tensor2& dy);

  void init_glorot(Rng& rng);

  std::vector<Dense>& layers() { return layers_; }
  const std::vector<Dense>& layers() const { return layers_; }
  std::vector<BlockParams*> blocks();

 private:
  std::string name_;
  Activation activation_ = Activation::relu;
  std::vector<Dense> layers_;
};

}  // namespace kpg
