#pragma once

#include <span>

#include "kpg/nn/params.hpp"

namespace kpg {

struct AdamOptions {
  double learning_rate = 5e-4;
  double decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One Adam step on every parameter of the block, then zeroes gradients.
/// The learning rate decays as lr / (1 + decay * k), k = updates already applied.
void adam_update(BlockParams& params, double learning_rate, double decay);
void adam_update(BlockParams& params, const AdamOptions& options);
void adam_update(std::span<BlockParams* const> blocks, const AdamOptions& options);

void zero_grad(std::span<BlockParams* const> blocks);

/// Multiplies every gradient by `factor` (batch averaging).
void scale_grad(std::span<BlockParams* const> blocks, double factor);

}  // namespace kpg
