#include "kpg/nn/gcn.hpp"

#include <cmath>

#include "kpg/errors.hpp"

namespace kpg {

Tensor2 normalized_adjacency(std::span<const int> parent, EdgeDirection direction) {
  const auto n = static_cast<Index>(parent.size());
  Vector degree = Vector::Ones(n);
  for (Index v = 0; v < n; ++v) {
    const int p = parent[v];
    if (p < 0) continue;
    // Top-down edge p -> v raises in-degree of v; bottom-up edge v -> p raises p.
    degree(direction == EdgeDirection::kTopDown ? v : p) += 1.0;
  }
  Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  Tensor2 a = Tensor2::Zero(n, n);
  for (Index v = 0; v < n; ++v) {
    a(v, v) = inv_sqrt(v) * inv_sqrt(v);
    const int p = parent[v];
    if (p < 0) continue;
    const double w = inv_sqrt(v) * inv_sqrt(p);
    if (direction == EdgeDirection::kTopDown) {
      a(v, p) = w;
    } else {
      a(p, v) = w;
    }
  }
  return a;
}

GcnLayer::GcnLayer(std::string name, Index in, Index out) : params_(std::move(name)) {
  params_.add("weight", in, out);
}

Tensor2 GcnLayer::forward(const Tensor2& a_norm, const Tensor2& x, Cache* cache) const {
  if (a_norm.rows() != a_norm.cols()) {
    throw DimensionError("gcn block '" + params_.name() + "': adjacency is " +
                         std::to_string(a_norm.rows()) + "x" + std::to_string(a_norm.cols()) +
                         ", not square");
  }
  if (x.rows() != a_norm.rows()) {
    throw DimensionError("gcn block '" + params_.name() + "': " + std::to_string(x.rows()) +
                         " feature rows for " + std::to_string(a_norm.rows()) + " nodes");
  }
  if (x.cols() != in_width()) {
    throw DimensionError("gcn block '" + params_.name() + "': input has " +
                         std::to_string(x.cols()) + " columns, expected " +
                         std::to_string(in_width()));
  }
  // Bag-of-words rows are mostly zeros; multiply through the nonzeros only.
  const Index nonzeros = (x.array() != 0.0).count();
  const bool sparse = nonzeros * 4 < x.size();
  Tensor2 out;
  SparseRows xs;
  if (sparse) {
    xs = x.sparseView();
    out = (a_norm * (xs * weight())).cwiseMax(0.0);
  } else {
    out = (a_norm * (x * weight())).cwiseMax(0.0);
  }
  if (cache) {
    cache->sparse = sparse;
    if (sparse) {
      cache->x_sparse = std::move(xs);
      cache->x.resize(0, 0);
    } else {
      cache->x = x;
      cache->x_sparse.resize(0, 0);
    }
    cache->a_norm = a_norm;
    cache->out = out;
  }
  return out;
}

Tensor2 GcnLayer::backward(const Cache& cache, const Tensor2& dh, bool want_input_grad) {
  Tensor2 dpre = (cache.out.array() > 0.0).select(dh, 0.0);
  const Tensor2 back = cache.a_norm.transpose() * dpre;
  if (cache.sparse) {
    params_[0].grad += Tensor2(cache.x_sparse.transpose() * back);
  } else {
    params_[0].grad.noalias() += cache.x.transpose() * back;
  }
  if (!want_input_grad) return {};
  return back * weight().transpose();
}

void GcnLayer::init_glorot(Rng& rng) { glorot_uniform(weight(), in_width(), out_width(), rng); }

}  // namespace kpg
