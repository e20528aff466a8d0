#pragma once

#include <span>
#include <string>

#include "kpg/nn/params.hpp"

namespace kpg {

enum class EdgeDirection {
  kTopDown,   ///< each node aggregates from its parent
  kBottomUp,  ///< each node aggregates from its children
};

/// Self-loop normalized adjacency for a rooted tree given as a parent array
/// (parent[root] = -1):
///
///   A_hat = D^{-1/2} (A + I)^T D^{-1/2},   d_j = 1 + in-degree(j)
///
/// where A[i][j] = 1 for an edge i -> j under the chosen direction. Row j of
/// A_hat therefore collects node j itself and every node pointing into j.
Tensor2 normalized_adjacency(std::span<const int> parent,
                             EdgeDirection direction = EdgeDirection::kTopDown);

/// h = ReLU(a_norm * x * W). No bias.
class GcnLayer {
 public:
  struct Cache {
    Tensor2 x;                // dense input, empty when the sparse copy is used
    SparseRows x_sparse;      // input as sparse rows when mostly zeros
    bool sparse = false;
    Tensor2 a_norm;
    Tensor2 out;              // post-ReLU, doubles as the mask
  };

  GcnLayer() = default;
  GcnLayer(std::string name, Index in, Index out);

  Index in_width() const { return params_[0].value.rows(); }
  Index out_width() const { return params_[0].value.cols(); }

  Tensor2 forward(const Tensor2& a_norm, const Tensor2& x, Cache* cache = nullptr) const;

  /// Accumulates dW. Returns dL/dx when `want_input_grad`, else an empty tensor.
  Tensor2 backward(const Cache& cache, const Tensor2& dh, bool want_input_grad = true);

  void init_glorot(Rng& rng);

  Tensor2& weight() { return params_[0].value; }
  const Tensor2& weight() const { return params_[0].value; }
  BlockParams& params() { return params_; }
  const BlockParams& params() const { return params_; }

 private:
  BlockParams params_;
};

}  // namespace kpg
