#include "kpg/nn/dense.hpp"

#include "kpg/errors.hpp"

namespace kpg {

Dense::Dense(std::string name, Index in, Index out) : params_(std::move(name)) {
  params_.add("weight", in, out);
  params_.add("bias", 1, out);
}

Tensor2 Dense::forward(const Tensor2& x, Cache* cache) const {
  if (x.cols() != in_width()) {
    throw DimensionError("dense block '" + params_.name() + "': input has " +
                         std::to_string(x.cols()) + " columns, expected " +
                         std::to_string(in_width()));
  }
  Tensor2 y = x * weight();
  y.rowwise() += bias().row(0);
  if (cache) cache->x = x;
  return y;
}

Tensor2 Dense::backward(const Cache& cache, const Tensor2& dy) {
  params_[kWeight].grad.noalias() += cache.x.transpose() * dy;
  params_[kBias].grad += dy.colwise().sum();
  return dy * weight().transpose();
}

void Dense::init_glorot(Rng& rng) {
  glorot_uniform(weight(), in_width(), out_width(), rng);
  bias().setZero();
}

}  // namespace kpg
