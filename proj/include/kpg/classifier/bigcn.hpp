#pragma once

#include <span>
#include <vector>

#include "kpg/graph/graph.hpp"
#include "kpg/nn/dense.hpp"
#include "kpg/nn/gcn.hpp"

namespace kpg {

/// Bidirectional GCN event classifier.
///
/// Each direction (top-down on the edges as given, bottom-up on reversed
/// edges) runs two GCN layers d -> h -> h. After layer 1 every node's hidden
/// vector is concatenated with the root's layer-1 hidden vector, and the same
/// root vector is appended again after layer 2. Each direction is mean-pooled
/// to 2h; the two poolings are concatenated and a dense head maps 4h to class
/// logits.
class BiGcn {
 public:
  struct DirectionCache {
    int root = 0;
    GcnLayer::Cache conv1;
    GcnLayer::Cache conv2;
  };
  struct Cache {
    DirectionCache top_down;
    DirectionCache bottom_up;
    Dense::Cache head;
  };

  BiGcn() = default;
  BiGcn(Index features, Index hidden, Index classes);

  void init(Rng& rng);

  Index features() const { return td_conv1_.in_width(); }
  Index hidden() const { return td_conv1_.out_width(); }
  Index classes() const { return head_.out_width(); }

  /// Class probabilities. Throws DimensionError on a feature-width mismatch
  /// and InputError for an empty or non-tree graph.
  RowVector forward(const Graph& graph) const;
  RowVector logits(const Graph& graph, Cache* cache = nullptr) const;

  /// Cross-entropy of one graph; accumulates gradients scaled by `weight`.
  double loss_backward(const Graph& graph, int label, double weight = 1.0);

  int predict(const Graph& graph) const;

  std::vector<BlockParams*> blocks();
  std::vector<const BlockParams*> blocks() const;

  Dense& head() { return head_; }

 private:
  RowVector direction_forward(const GcnLayer& conv1, const GcnLayer& conv2, const Tensor2& a_norm,
                              const Tensor2& x, int root, DirectionCache* cache) const;
  void direction_backward(GcnLayer& conv1, GcnLayer& conv2, const DirectionCache& cache,
                          const RowVector& dpooled);

  GcnLayer td_conv1_, td_conv2_;
  GcnLayer bu_conv1_, bu_conv2_;
  Dense head_;
};

}  // namespace kpg
