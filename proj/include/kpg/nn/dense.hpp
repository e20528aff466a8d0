#pragma once

#include <string>

#include "kpg/nn/params.hpp"

namespace kpg {

/// Fully connected layer y = x W + b, rows of x are samples.
class Dense {
 public:
  struct Cache {
    Tensor2 x;
  };

  Dense() = default;
  Dense(std::string name, Index in, Index out);

  Index in_width() const { return params_[kWeight].value.rows(); }
  Index out_width() const { return params_[kWeight].value.cols(); }

  Tensor2 forward(const Tensor2& x, Cache* cache = nullptr) const;

  /// Accumulates parameter gradients and returns dL/dx.
  Tensor2 backward(const Cache& cache, const Tensor2& dy);

  void init_glorot(Rng& rng);

  Tensor2& weight() { return params_[kWeight].value; }
  const Tensor2& weight() const { return params_[kWeight].value; }
  Tensor2& bias() { return params_[kBias].value; }
  const Tensor2& bias() const { return params_[kBias].value; }

  BlockParams& params() { return params_; }
  const BlockParams& params() const { return params_; }

 private:
  static constexpr std::size_t kWeight = 0;
  static constexpr std::size_t kBias = 1;
  BlockParams params_;
};

}  // namespace kpg
