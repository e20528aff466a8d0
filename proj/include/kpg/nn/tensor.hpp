#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace kpg {

using Index = Eigen::Index;
using Tensor2 = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Every random draw in the project goes through this engine type.
using Rng = std::mt19937_64;

inline bool all_finite(const Tensor2& t) { return t.allFinite(); }

/// Mixes a base seed with a tag so independent streams never collide.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace kpg
