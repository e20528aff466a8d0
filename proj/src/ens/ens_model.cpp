#include "kpg/ens/ens_model.hpp"

#include <cmath>

#include "kpg/errors.hpp"
#include "kpg/nn/functional.hpp"

namespace kpg {

EnsModel::EnsModel(Index features, Index hidden, Index classes)
    : gcn_("ens.gcn", features, hidden),
      scorer_("ens.scorer", features + hidden, 1),
      head_("ens.head", hidden, classes) {}

void EnsModel::init(Rng& rng) {
  gcn_.init_glorot(rng);
  scorer_.init_glorot(rng);
  head_.init_glorot(rng);
}

Tensor2 EnsModel::encode(const Graph& key_graph, GcnLayer::Cache* cache) const {
  return gcn_.forward(normalized_adjacency(key_graph.parent), key_graph.features, cache);
}

Tensor2 EnsModel::candidate_features(const KeyGraphState& key, const Tensor2& embeddings,
                                     std::span<const int> candidates,
                                     const CandidateGraph& pool) const {
  const Index d = features();
  Tensor2 x = Tensor2::Zero(static_cast<Index>(candidates.size()), d + hidden());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto v = static_cast<std::size_t>(candidates[i]);
    const auto row = static_cast<Index>(i);
    x.row(row).head(d) = pool.features[v];
    const int parent_pos = key.position(pool.parent[v]);
    if (parent_pos >= 0) x.row(row).tail(hidden()) = embeddings.row(parent_pos);
  }
  return x;
}

ActionDistribution EnsModel::action_distribution(const KeyGraphState& key,
                                                 const Tensor2& embeddings,
                                                 const CandidateChoice& choice,
                                                 const CandidateGraph& pool) const {
  if (choice.nodes.empty()) throw InputError("action_distribution: empty candidate set");
  const Tensor2 scores = scorer_.forward(candidate_features(key, embeddings, choice.nodes, pool));
  ActionDistribution dist;
  dist.candidates = choice.nodes;
  dist.tag = choice.tag;
  dist.probabilities = softmax(scores.col(0).transpose());
  return dist;
}

RowVector EnsModel::head_probabilities(const Graph& key_graph) const {
  const Tensor2 h = encode(key_graph);
  return softmax(head_.forward(h.colwise().mean()));
}

EnsStepLoss EnsModel::compute(const KeyGraphState& before, const CandidateChoice& choice,
                              std::size_t chosen, const KeyGraphState& after,
                              const CandidateGraph& pool, double reward, double penalty, int label,
                              const EnsLossOptions& o, bool backward) {
  if (choice.nodes.empty() || chosen >= choice.nodes.size()) {
    throw InputError("ens loss: chosen action outside the candidate set");
  }
  EnsStepLoss out;
  const double weight = penalty * reward;

  // Policy part: -ln p_t[v_t] over the candidate scores of g_t.
  double policy_coeff = 0.0;
  if (o.variant == EnsLossVariant::kActionLikelihood) {
    policy_coeff = weight;
  } else {
    policy_coeff = o.pg_weight * std::max(0.0, 1.0 - weight);
  }
  GcnLayer::Cache enc_before;
  Dense::Cache score_cache;
  const Tensor2 h_before = encode(before.graph, &enc_before);
  const Tensor2 x = candidate_features(before, h_before, choice.nodes, pool);
  const Tensor2 scores = scorer_.forward(x, &score_cache);
  const RowVector p = softmax(scores.col(0).transpose());
  const double nll = cross_entropy(p, static_cast<int>(chosen));
  out.policy = policy_coeff * nll;

  // Classification part on g_{t+1}.
  double ce_coeff = 0.0;
  GcnLayer::Cache enc_after;
  Dense::Cache head_cache;
  RowVector q;
  if (o.variant == EnsLossVariant::kHeadCrossEntropy) {
    ce_coeff = o.ce_weight * weight;
    const Tensor2 h_after = encode(after.graph, &enc_after);
    q = softmax(head_.forward(h_after.colwise().mean(), &head_cache));
    out.cross_entropy = ce_coeff * cross_entropy(q, label);
  }
  out.total = out.policy + out.cross_entropy;
  if (!backward) return out;

  if (policy_coeff != 0.0) {
    const RowVector dscores = softmax_cross_entropy_grad(p, static_cast<int>(chosen)) * policy_coeff;
    const Tensor2 dx = scorer_.backward(score_cache, dscores.transpose());
    Tensor2 dh = Tensor2::Zero(h_before.rows(), h_before.cols());
    for (std::size_t i = 0; i < choice.nodes.size(); ++i) {
      const int parent_pos = before.position(pool.parent[static_cast<std::size_t>(choice.nodes[i])]);
      if (parent_pos >= 0) dh.row(parent_pos) += dx.row(static_cast<Index>(i)).tail(hidden());
    }
    gcn_.backward(enc_before, dh, false);
  }
  if (ce_coeff != 0.0) {
    const RowVector dlogits = softmax_cross_entropy_grad(q, label) * ce_coeff;
    const RowVector dpooled = head_.backward(head_cache, dlogits);
    const Index n = after.graph.size();
    Tensor2 dh(n, hidden());
    dh.rowwise() = dpooled / static_cast<double>(n);
    gcn_.backward(enc_after, dh, false);
  }
  return out;
}

EnsStepLoss EnsModel::loss_backward(const KeyGraphState& before, const CandidateChoice& choice,
                                    std::size_t chosen, const KeyGraphState& after,
                                    const CandidateGraph& pool, double reward, double penalty,
                                    int label, const EnsLossOptions& options) {
  return compute(before, choice, chosen, after, pool, reward, penalty, label, options, true);
}

EnsStepLoss EnsModel::loss(const KeyGraphState& before, const CandidateChoice& choice,
                           std::size_t chosen, const KeyGraphState& after,
                           const CandidateGraph& pool, double reward, double penalty, int label,
                           const EnsLossOptions& options) const {
  return const_cast<EnsModel*>(this)->compute(before, choice, chosen, after, pool, reward, penalty,
                                              label, options, false);
}

std::vector<BlockParams*> EnsModel::blocks() {
  return {&gcn_.params(), &scorer_.params(), &head_.params()};
}

std::vector<const BlockParams*> EnsModel::blocks() const {
  return {&gcn_.params(), &scorer_.params(), &head_.params()};
}

int greedy_action(const ActionDistribution& dist) {
  return dist.candidates[static_cast<std::size_t>(argmax(dist.probabilities))];
}

int sample_action(const ActionDistribution& dist, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  for (Index i = 0; i < dist.probabilities.size(); ++i) {
    u -= dist.probabilities(i);
    if (u < 0.0) return dist.candidates[static_cast<std::size_t>(i)];
  }
  return dist.candidates.back();
}

}  // namespace kpg
