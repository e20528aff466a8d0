#include "kpg/classifier/bigcn.hpp"

#include "kpg/errors.hpp"
#include "kpg/nn/functional.hpp"

namespace kpg {

BiGcn::BiGcn(Index features, Index hidden, Index classes)
    : td_conv1_("bigcn.td.conv1", features, hidden),
      td_conv2_("bigcn.td.conv2", 2 * hidden, hidden),
      bu_conv1_("bigcn.bu.conv1", features, hidden),
      bu_conv2_("bigcn.bu.conv2", 2 * hidden, hidden),
      head_("bigcn.head", 4 * hidden, classes) {}

void BiGcn::init(Rng& rng) {
  td_conv1_.init_glorot(rng);
  td_conv2_.init_glorot(rng);
  bu_conv1_.init_glorot(rng);
  bu_conv2_.init_glorot(rng);
  head_.init_glorot(rng);
}

RowVector BiGcn::direction_forward(const GcnLayer& conv1, const GcnLayer& conv2,
                                   const Tensor2& a_norm, const Tensor2& x, int root,
                                   DirectionCache* cache) const {
  const Index n = x.rows();
  const Index h = hidden();
  Tensor2 h1 = conv1.forward(a_norm, x, cache ? &cache->conv1 : nullptr);
  const RowVector root1 = h1.row(root);
  Tensor2 z1(n, 2 * h);
  z1.leftCols(h) = h1;
  z1.rightCols(h).rowwise() = root1;
  Tensor2 h2 = conv2.forward(a_norm, z1, cache ? &cache->conv2 : nullptr);
  RowVector pooled(2 * h);
  pooled.head(h) = h2.colwise().mean();
  pooled.tail(h) = root1;
  if (cache) cache->root = root;
  return pooled;
}

void BiGcn::direction_backward(GcnLayer& conv1, GcnLayer& conv2, const DirectionCache& cache,
                               const RowVector& dpooled) {
  const Index h = hidden();
  const Index n = cache.conv2.out.rows();
  RowVector droot = dpooled.tail(h);
  Tensor2 dh2 = Tensor2::Constant(n, h, 0.0);
  dh2.rowwise() = dpooled.head(h) / static_cast<double>(n);
  Tensor2 dz1 = conv2.backward(cache.conv2, dh2);
  Tensor2 dh1 = dz1.leftCols(h);
  droot += dz1.rightCols(h).colwise().sum();
  dh1.row(cache.root) += droot;
  conv1.backward(cache.conv1, dh1, false);
}

RowVector BiGcn::logits(const Graph& graph, Cache* cache) const {
  if (graph.size() == 0) throw InputError("bigcn: empty graph");
  if (graph.features.rows() != graph.size()) {
    throw DimensionError("bigcn: " + std::to_string(graph.features.rows()) +
                         " feature rows for " + std::to_string(graph.size()) + " nodes");
  }
  if (graph.features.cols() != features()) {
    throw DimensionError("bigcn: feature width " + std::to_string(graph.features.cols()) +
                         ", model expects " + std::to_string(features()));
  }
  const int root = find_root(graph.parent);
  if (root < 0) throw InputError("bigcn: graph has no unique root");
  const Tensor2 a_td = normalized_adjacency(graph.parent, EdgeDirection::kTopDown);
  const Tensor2 a_bu = normalized_adjacency(graph.parent, EdgeDirection::kBottomUp);
  RowVector pooled(4 * hidden());
  pooled.head(2 * hidden()) = direction_forward(td_conv1_, td_conv2_, a_td, graph.features, root,
                                                cache ? &cache->top_down : nullptr);
  pooled.tail(2 * hidden()) = direction_forward(bu_conv1_, bu_conv2_, a_bu, graph.features, root,
                                                cache ? &cache->bottom_up : nullptr);
  return head_.forward(pooled, cache ? &cache->head : nullptr);
}

RowVector BiGcn::forward(const Graph& graph) const { return softmax(logits(graph)); }

int BiGcn::predict(const Graph& graph) const { return static_cast<int>(argmax(logits(graph))); }

double BiGcn::loss_backward(const Graph& graph, int label, double weight) {
  Cache cache;
  const RowVector p = softmax(logits(graph, &cache));
  const double loss = cross_entropy(p, label);
  const RowVector dlogits = softmax_cross_entropy_grad(p, label) * weight;
  const RowVector dpooled = head_.backward(cache.head, dlogits);
  direction_backward(td_conv1_, td_conv2_, cache.top_down, dpooled.head(2 * hidden()));
  direction_backward(bu_conv1_, bu_conv2_, cache.bottom_up, dpooled.tail(2 * hidden()));
  return loss;
}

std::vector<BlockParams*> BiGcn::blocks() {
  return {&td_conv1_.params(), &td_conv2_.params(), &bu_conv1_.params(), &bu_conv2_.params(),
          &head_.params()};
}

std::vector<const BlockParams*> BiGcn::blocks() const {
  return {&td_conv1_.params(), &td_conv2_.params(), &bu_conv1_.params(), &bu_conv2_.params(),
          &head_.params()};
}

}  // namespace kpg
