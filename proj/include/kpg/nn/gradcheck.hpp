#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kpg/nn/params.hpp"

namespace kpg {

inline constexpr double kGradCheckFloor = 1e-6;

struct GradCheckEntry {
  std::string tensor;  // "<block>.<param>"
  double max_relative_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double worst = 0.0;
  bool passed = false;
};

/// Compares the analytic gradients already stored in `blocks` with central
/// differences of `loss`. Per tensor the error is
///   max_i |g_i - n_i| / max(max_i |g_i|, max_i |n_i|, kGradCheckFloor).
/// The floor keeps tensors whose true gradient is zero from being judged on
/// rounding noise alone.
GradCheckReport finite_difference_check(std::span<BlockParams* const> blocks,
                                         const std::function<double()>& loss,
                                         double tolerance, double step = 1e-5);

}  // namespace kpg
