#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kpg/nn/tensor.hpp"

namespace kpg {

/// One trainable tensor with its gradient slot and Adam moments.
struct Parameter {
  std::string name;
  Tensor2 value;
  Tensor2 grad;
  Tensor2 m;
  Tensor2 v;
};

/// Named parameters of a single block. Gradient and moment tensors always
/// share the shape of their parameter; moments start at zero.
class BlockParams {
 public:
  BlockParams() = default;
  explicit BlockParams(std::string block_name) : name_(std::move(block_name)) {}

  Parameter& add(std::string param_name, Index rows, Index cols);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return params_.size(); }

  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }

  Parameter& find(std::string_view param_name);
  const Parameter& find(std::string_view param_name) const;

  std::vector<Parameter>& all() noexcept { return params_; }
  const std::vector<Parameter>& all() const noexcept { return params_; }

  void zero_grad();
  Index parameter_count() const;

  /// Number of Adam updates applied so far.
  std::int64_t step = 0;

 private:
  std::string name_;
  std::vector<Parameter> params_;
};

/// Glorot/Xavier uniform fill in [-sqrt(6/(fan_in+fan_out)), +...].
void glorot_uniform(Tensor2& w, Index fan_in, Index fan_out, Rng& rng);

}  // namespace kpg
