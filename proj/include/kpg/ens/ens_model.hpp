#pragma once

#include <span>
#include <vector>

#include "kpg/ens/candidates.hpp"
#include "kpg/nn/dense.hpp"
#include "kpg/nn/gcn.hpp"

namespace kpg {

struct ActionDistribution {
  std::vector<int> candidates;
  RowVector probabilities;
  CandidateTag tag = CandidateTag::kLocal;
};

/// Which reading of the selector loss to optimize.
enum class EnsLossVariant {
  /// weight_ce * Rbar * R * CE(head(g_{t+1}), y) + weight_pg * max(0, 1 - Rbar*R) * -ln p_t[v_t]
  kHeadCrossEntropy,
  /// Rbar * R * -ln p_t[v_t]
  kActionLikelihood,
};

struct EnsLossOptions {
  EnsLossVariant variant = EnsLossVariant::kHeadCrossEntropy;
  double ce_weight = 1.0;
  double pg_weight = 1.0;
};

struct EnsStepLoss {
  double total = 0.0;
  double cross_entropy = 0.0;
  double policy = 0.0;
};

/// Ending node selector: a GCN over the key graph, a linear scorer over
/// candidate features augmented with their parent's embedding, and a
/// classification head over the mean-pooled key-graph embedding.
class EnsModel {
 public:
  EnsModel() = default;
  EnsModel(Index features, Index hidden, Index classes);

  void init(Rng& rng);

  Index features() const { return gcn_.in_width(); }
  Index hidden() const { return gcn_.out_width(); }
  Index classes() const { return head_.out_width(); }

  /// H = ReLU(A_hat X W) over the key graph, one row per key-graph node.
  Tensor2 encode(const Graph& key_graph, GcnLayer::Cache* cache = nullptr) const;

  /// X[v] || H[parent(v)] when the parent is in the key graph, X[v] || 0 otherwise.
  Tensor2 candidate_features(const KeyGraphState& key, const Tensor2& embeddings,
                             std::span<const int> candidates, const CandidateGraph& pool) const;

  /// softmax(FC(X'[C])). Throws InputError for an empty candidate list.
  ActionDistribution action_distribution(const KeyGraphState& key, const Tensor2& embeddings,
                                         const CandidateChoice& choice,
                                         const CandidateGraph& pool) const;

  /// Class probabilities of the selector's own head on a key graph.
  RowVector head_probabilities(const Graph& key_graph) const;

  /// Step loss for choosing candidates[chosen] from `before` (giving `after`);
  /// accumulates gradients into every block.
  EnsStepLoss loss_backward(const KeyGraphState& before, const CandidateChoice& choice,
                            std::size_t chosen, const KeyGraphState& after,
                            const CandidateGraph& pool, double reward, double penalty, int label,
                            const EnsLossOptions& options);

  /// Forward-only twin of loss_backward.
  EnsStepLoss loss(const KeyGraphState& before, const CandidateChoice& choice, std::size_t chosen,
                   const KeyGraphState& after, const CandidateGraph& pool, double reward,
                   double penalty, int label, const EnsLossOptions& options) const;

  std::vector<BlockParams*> blocks();
  std::vector<const BlockParams*> blocks() const;

  GcnLayer& gcn() { return gcn_; }
  Dense& scorer() { return scorer_; }
  Dense& head() { return head_; }

 private:
  EnsStepLoss compute(const KeyGraphState& before, const CandidateChoice& choice,
                      std::size_t chosen, const KeyGraphState& after, const CandidateGraph& pool,
                      double reward, double penalty, int label, const EnsLossOptions& options,
                      bool backward);

  GcnLayer gcn_;
  Dense scorer_;
  Dense head_;
};

/// Greedy choice under the current policy; ties go to the lowest node id.
int greedy_action(const ActionDistribution& dist);

/// Draws a node from the distribution.
int sample_action(const ActionDistribution& dist, Rng& rng);

}  // namespace kpg
