#include "kpg/nn/params.hpp"

#include <cmath>

#include "kpg/errors.hpp"

namespace kpg {

Parameter& BlockParams::add(std::string param_name, Index rows, Index cols) {
  Parameter p;
  p.name = std::move(param_name);
  p.value = Tensor2::Zero(rows, cols);
  p.grad = Tensor2::Zero(rows, cols);
  p.m = Tensor2::Zero(rows, cols);
  p.v = Tensor2::Zero(rows, cols);
  params_.push_back(std::move(p));
  return params_.back();
}

Parameter& BlockParams::find(std::string_view param_name) {
  for (auto& p : params_) {
    if (p.name == param_name) return p;
  }
  throw InputError("block '" + name_ + "' has no parameter '" + std::string(param_name) + "'");
}

const Parameter& BlockParams::find(std::string_view param_name) const {
  return const_cast<BlockParams*>(this)->find(param_name);
}

void BlockParams::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

Index BlockParams::parameter_count() const {
  Index total = 0;
  for (const auto& p : params_) total += p.value.size();
  return total;
}

void glorot_uniform(Tensor2& w, Index fan_in, Index fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Index j = 0; j < w.cols(); ++j) {
    for (Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
  }
}

}  // namespace kpg
