#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "kpg/graph/tree.hpp"
#include "kpg/graph/vocab.hpp"
#include "kpg/nn/params.hpp"
#include "kpg/nn/tensor.hpp"

namespace testing {

using kpg::Index;
using kpg::Rng;
using kpg::RowVector;
using kpg::Tensor2;

inline Tensor2 random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor2 m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

inline RowVector random_row(Index cols, Rng& rng, double scale = 1.0) {
  return random_matrix(1, cols, rng, scale).row(0);
}

/// Triple loop, no Eigen products.
inline Tensor2 naive_matmul(const Tensor2& a, const Tensor2& b) {
  Tensor2 c = Tensor2::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline double max_abs_diff(const Tensor2& a, const Tensor2& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Random parent array: node i > 0 hangs under a uniform earlier node.
inline std::vector<int> random_parents(int n, Rng& rng) {
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    parent[static_cast<std::size_t>(i)] = pick(rng);
  }
  return parent;
}

/// A valid propagation tree with small random texts drawn from `words`.
inline kpg::PropagationTree random_tree(const std::string& id, int label, int n, Rng& rng,
                                        const std::vector<std::string>& words) {
  const auto parent = random_parents(n, rng);
  std::uniform_int_distribution<std::size_t> word(0, words.size() - 1);
  std::uniform_int_distribution<int> len(0, 4);
  std::vector<kpg::Post> posts;
  for (int i = 0; i < n; ++i) {
    kpg::Post p;
    p.id = "p" + std::to_string(i);
    if (i > 0) p.parent_id = "p" + std::to_string(parent[static_cast<std::size_t>(i)]);
    p.time_offset_min = i == 0 ? 0.0 : static_cast<double>(i);
    const int l = len(rng) + (i == 0 ? 1 : 0);
    for (int k = 0; k < l; ++k) p.raw_text += (k ? " " : "") + words[word(rng)];
    posts.push_back(std::move(p));
  }
  return kpg::make_tree(id, label, std::move(posts));
}

inline std::vector<std::string> word_list(int n) {
  std::vector<std::string> w;
  for (int i = 0; i < n; ++i) w.push_back("w" + std::to_string(i));
  return w;
}

/// Sum over a gradient tensor, for "did anything flow" checks.
inline double grad_norm(const kpg::BlockParams& b) {
  double s = 0.0;
  for (const auto& p : b.all()) s += p.grad.squaredNorm();
  return std::sqrt(s);
}

}  // namespace testing
