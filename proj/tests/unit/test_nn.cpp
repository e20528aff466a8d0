#include <algorithm>
#include <cmath>
#include <numeric>

#include "../common/gradcases.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "kpg/errors.hpp"
#include "kpg/nn/adam.hpp"
#include "kpg/nn/dense.hpp"
#include "kpg/nn/functional.hpp"
#include "kpg/nn/gcn.hpp"
#include "kpg/nn/gru.hpp"
#include "kpg/nn/mlp.hpp"

using namespace kpg;
using testing::naive_matmul;
using testing::random_matrix;

TEST_CASE("dense: identity and zero-weight cases") {
  Dense d("fc", 2, 2);
  d.weight() = Tensor2::Identity(2, 2);
  d.bias().setZero();
  Tensor2 x(1, 2);
  x << 1, 2;
  CHECK(testing::max_abs_diff(d.forward(x), x) == 0.0);

  d.weight().setZero();
  d.bias() << 3, 3;
  x << 5, 7;
  const Tensor2 y = d.forward(x);
  CHECK(y(0, 0) == 3.0);
  CHECK(y(0, 1) == 3.0);
}

TEST_CASE("dense: matches a triple-loop oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    Dense d("fc", 7, 5);
    d.weight() = random_matrix(7, 5, rng);
    d.bias() = random_matrix(1, 5, rng);
    const Tensor2 x = random_matrix(4, 7, rng);
    Tensor2 expected = naive_matmul(x, d.weight());
    for (Index i = 0; i < expected.rows(); ++i) expected.row(i) += d.bias().row(0);
    CHECK(testing::max_abs_diff(d.forward(x), expected) < 1e-12);
  }
}

TEST_CASE("dense: width mismatch names the block") {
  Dense d("scorer", 3, 1);
  try {
    d.forward(Tensor2::Zero(1, 4));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("scorer") != std::string::npos);
  }
}

TEST_CASE("mlp: one layer equals dense, zero weights give the final bias") {
  Rng rng(3);
  Mlp one("m", {3, 2});
  one.layers()[0].weight() = random_matrix(3, 2, rng);
  one.layers()[0].bias() = random_matrix(1, 2, rng);
  const Tensor2 x = random_matrix(2, 3, rng);
  CHECK(testing::max_abs_diff(one.forward(x), one.layers()[0].forward(x)) == 0.0);

  Mlp deep("m", {3, 4, 2});
  for (auto& l : deep.layers()) {
    l.weight().setZero();
    l.bias().setZero();
  }
  deep.layers().back().bias() << 0.25, -1.5;
  const Tensor2 y = deep.forward(x);
  CHECK(y(1, 0) == 0.25);
  CHECK(y(1, 1) == -1.5);
}

TEST_CASE("mlp: matches a layer-by-layer oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const bool use_tanh = seed % 2 == 1;
    Mlp m("m", {5, 6, 4, 3}, use_tanh ? Mlp::Activation::tanh : Mlp::Activation::relu);
    for (auto& l : m.layers()) {
      l.weight() = random_matrix(l.in_width(), l.out_width(), rng);
      l.bias() = random_matrix(1, l.out_width(), rng);
    }
    const Tensor2 x = random_matrix(3, 5, rng);
    Tensor2 h = x;
    for (std::size_t k = 0; k < m.layers().size(); ++k) {
      Tensor2 z = naive_matmul(h, m.layers()[k].weight());
      for (Index i = 0; i < z.rows(); ++i) z.row(i) += m.layers()[k].bias().row(0);
      if (k + 1 < m.layers().size()) {
        for (Index i = 0; i < z.size(); ++i) {
          double& v = z.data()[i];
          v = use_tanh ? std::tanh(v) : std::max(v, 0.0);
        }
      }
      h = z;
    }
    CHECK(testing::max_abs_diff(m.forward(x), h) < 1e-12);
  }
}

TEST_CASE("mlp: tanh backward matches finite differences") {
  Rng rng(12);
  Mlp m("m", {4, 5, 3}, Mlp::Activation::tanh);
  m.init_glorot(rng);
  const Tensor2 x = random_matrix(2, 4, rng);
  const Tensor2 dy = random_matrix(2, 3, rng);
  auto loss = [&](const Tensor2& in) { return (m.forward(in).array() * dy.array()).sum(); };
  Mlp::Cache cache;
  m.forward(x, &cache);
  const Tensor2 dx = m.backward(cache, dy);
  const double eps = 1e-6;
  for (Index i = 0; i < x.size(); ++i) {
    Tensor2 plus = x;
    Tensor2 minus = x;
    plus.data()[i] += eps;
    minus.data()[i] -= eps;
    CHECK(dx.data()[i] == doctest::Approx((loss(plus) - loss(minus)) / (2 * eps)).epsilon(1e-6));
  }
}

TEST_CASE("normalized adjacency: two-node path") {
  const std::vector<int> parent{-1, 0};
  const Tensor2 a = normalized_adjacency(parent, EdgeDirection::kTopDown);
  CHECK(a(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a(0, 1) == 0.0);
  CHECK(a(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(a(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normalized adjacency: bottom-up is the top-down transpose pattern") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto parent = testing::random_parents(2 + trial % 9, rng);
    const Tensor2 td = normalized_adjacency(parent, EdgeDirection::kTopDown);
    const Tensor2 bu = normalized_adjacency(parent, EdgeDirection::kBottomUp);
    const auto n = static_cast<Index>(parent.size());
    // Oracle: count in-degrees per direction and apply the formula entrywise.
    std::vector<double> deg_td(parent.size(), 1.0);
    std::vector<double> deg_bu(parent.size(), 1.0);
    for (Index i = 1; i < n; ++i) {
      deg_td[static_cast<std::size_t>(i)] += 1.0;
      deg_bu[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])] += 1.0;
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        const bool td_edge = i == j || parent[static_cast<std::size_t>(i)] == j;
        const bool bu_edge = i == j || parent[static_cast<std::size_t>(j)] == i;
        const double e_td = td_edge ? 1.0 / std::sqrt(deg_td[i] * deg_td[j]) : 0.0;
        const double e_bu = bu_edge ? 1.0 / std::sqrt(deg_bu[i] * deg_bu[j]) : 0.0;
        CHECK(td(i, j) == doctest::Approx(e_td).epsilon(1e-14));
        CHECK(bu(i, j) == doctest::Approx(e_bu).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("gcn layer: worked examples") {
  GcnLayer g("gcn", 2, 2);
  g.weight() = Tensor2::Identity(2, 2);
  Tensor2 a1(1, 1);
  a1 << 1.0;
  Tensor2 x1(1, 2);
  x1 << 2, -3;
  const Tensor2 h1 = g.forward(a1, x1);
  CHECK(h1(0, 0) == 2.0);
  CHECK(h1(0, 1) == 0.0);

  const std::vector<int> parent{-1, 0};
  const Tensor2 a = normalized_adjacency(parent, EdgeDirection::kTopDown);
  const Tensor2 h = g.forward(a, Tensor2::Identity(2, 2));
  CHECK(h(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(h(1, 1) == doctest::Approx(0.5));

  CHECK(g.forward(a, Tensor2::Zero(2, 2)).isZero());
}

TEST_CASE("gcn layer: errors") {
  GcnLayer g("td_conv1", 3, 2);
  CHECK_THROWS_AS(g.forward(Tensor2::Zero(2, 3), Tensor2::Zero(2, 3)), DimensionError);
  CHECK_THROWS_AS(g.forward(Tensor2::Identity(2, 2), Tensor2::Zero(3, 3)), DimensionError);
  CHECK_THROWS_AS(g.forward(Tensor2::Identity(2, 2), Tensor2::Zero(2, 4)), DimensionError);
}

TEST_CASE("gcn layer: relabeling nodes permutes output rows") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const int n = 6;
    GcnLayer g("gcn", 4, 3);
    g.weight() = random_matrix(4, 3, rng);
    const Tensor2 a = random_matrix(n, n, rng);
    const Tensor2 x = random_matrix(n, 4, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Tensor2 pa(n, n);
    Tensor2 px(n, 4);
    for (int i = 0; i < n; ++i) {
      px.row(i) = x.row(perm[i]);
      for (int j = 0; j < n; ++j) pa(i, j) = a(perm[i], perm[j]);
    }
    const Tensor2 h = g.forward(a, x);
    const Tensor2 ph = g.forward(pa, px);
    for (int i = 0; i < n; ++i) CHECK((ph.row(i) - h.row(perm[i])).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("gcn layer: sparse and dense inputs agree") {
  Rng rng(4);
  GcnLayer g("gcn", 20, 3);
  g.init_glorot(rng);
  const auto parent = testing::random_parents(5, rng);
  const Tensor2 a = normalized_adjacency(parent, EdgeDirection::kTopDown);
  Tensor2 sparse = Tensor2::Zero(5, 20);
  for (int i = 0; i < 5; ++i) sparse(i, (i * 7) % 20) = 0.5 + i;
  Tensor2 dense = random_matrix(5, 20, rng);
  GcnLayer::Cache cs;
  GcnLayer::Cache cd;
  g.forward(a, sparse, &cs);
  g.forward(a, dense, &cd);
  CHECK(cs.sparse);
  CHECK_FALSE(cd.sparse);
  // Same input through both paths: embed the sparse matrix in a dense one
  // with a tiny perturbation that defeats the sparsity test.
  Tensor2 nudged = sparse;
  nudged.array() += 1e-300;
  CHECK(testing::max_abs_diff(g.forward(a, sparse), g.forward(a, nudged)) < 1e-12);
}

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scalar-per-gate GRU step written without Eigen products.
RowVector gru_oracle(const GruCell& cell, const RowVector& x, const RowVector& h) {
  const Index hd = cell.hidden();
  const auto& wx = cell.params()[0].value;
  const auto& wh = cell.params()[1].value;
  const auto& bx = cell.params()[2].value;
  const auto& bh = cell.params()[3].value;
  auto gate = [&](Index g, Index j, bool input) {
    double s = input ? bx(0, g * hd + j) : bh(0, g * hd + j);
    if (input) {
      for (Index k = 0; k < x.size(); ++k) s += x(k) * wx(k, g * hd + j);
    } else {
      for (Index k = 0; k < hd; ++k) s += h(k) * wh(k, g * hd + j);
    }
    return s;
  };
  RowVector out(hd);
  for (Index j = 0; j < hd; ++j) {
    const double r = sig(gate(0, j, true) + gate(0, j, false));
    const double z = sig(gate(1, j, true) + gate(1, j, false));
    const double n = std::tanh(gate(2, j, true) + r * gate(2, j, false));
    out(j) = (1.0 - z) * n + z * h(j);
  }
  return out;
}

}  // namespace

TEST_CASE("gru encoder: base cases") {
  GruEncoder enc("enc", 5, 3);
  CHECK(enc.encode(std::vector<int>{}).isZero());
  // Zero weights: every step halves the state, starting from zero.
  CHECK(enc.encode(std::vector<int>{1, 2, 3}).isZero());
  CHECK_THROWS_AS(enc.encode(std::vector<int>{5}), InputError);
  CHECK_THROWS_AS(enc.encode(std::vector<int>{-1}), InputError);
}

TEST_CASE("gru encoder: matches an unrolled per-gate oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    GruEncoder enc("enc", 6, 4);
    gradcases::randomize(enc.blocks(), rng);
    const std::vector<int> tokens{2, 5, 0};
    RowVector h = RowVector::Zero(4);
    for (int t : tokens) h = gru_oracle(enc.cell(), enc.embedding().lookup(t), h);
    CHECK((enc.encode(tokens) - h).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("gru decoder step: zero weights and composed oracle") {
  GruDecoder dec("dec", 4, 3, 2);
  RowVector h(2);
  h << 0.8, -0.4;
  const auto r = dec.step(h, 1);
  CHECK(r.logits.isZero());
  CHECK((r.h_next - 0.5 * h).cwiseAbs().maxCoeff() < 1e-15);

  Rng rng(5);
  gradcases::randomize(dec.blocks(), rng);
  const auto a = dec.step(h, 2);
  const auto b = dec.step(h, 2);
  CHECK(a.logits == b.logits);
  const RowVector h_next = gru_oracle(dec.cell(), dec.embedding().lookup(2), h);
  RowVector logits = dec.projection().bias().row(0);
  for (Index j = 0; j < logits.size(); ++j)
    for (Index k = 0; k < 2; ++k) logits(j) += h_next(k) * dec.projection().weight()(k, j);
  CHECK((a.h_next - h_next).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a.logits - logits).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gru cell: input and state gradients match finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    GruCell cell("gru", 3, 4);
    gradcases::randomize({&cell.params()}, rng);
    RowVector x = testing::random_row(3, rng);
    RowVector h = testing::random_row(4, rng);
    const RowVector w = testing::random_row(4, rng);
    GruCell::Cache c;
    cell.forward(x, h, &c);
    const auto g = cell.backward(c, w);
    auto numeric = [&](RowVector& v, Index i) {
      const double keep = v(i);
      v(i) = keep + 1e-6;
      const double up = cell.forward(x, h).dot(w);
      v(i) = keep - 1e-6;
      const double down = cell.forward(x, h).dot(w);
      v(i) = keep;
      return (up - down) / 2e-6;
    };
    for (Index i = 0; i < 3; ++i) CHECK(g.dx(i) == doctest::Approx(numeric(x, i)).epsilon(1e-6));
    for (Index i = 0; i < 4; ++i) CHECK(g.dh(i) == doctest::Approx(numeric(h, i)).epsilon(1e-6));
  }
}

TEST_CASE("softmax: examples and properties") {
  RowVector a(2);
  a << 0, 0;
  CHECK(softmax(a)(0) == doctest::Approx(0.5));
  a << 1000, 0;
  const RowVector s = softmax(a);
  CHECK(s.allFinite());
  CHECK(s(0) == doctest::Approx(1.0));
  RowVector b(3);
  b << std::log(1.0), std::log(2.0), std::log(3.0);
  const RowVector sb = softmax(b);
  CHECK(sb(0) == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(sb(1) == doctest::Approx(2.0 / 6).epsilon(1e-12));
  CHECK(sb(2) == doctest::Approx(3.0 / 6).epsilon(1e-12));

  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const RowVector x = testing::random_row(5, rng, 30.0);
    const RowVector p = softmax(x);
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    CHECK((p.array() > 0.0).all());
    std::vector<int> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    RowVector px(5);
    for (int i = 0; i < 5; ++i) px(i) = x(perm[i]);
    const RowVector pp = softmax(px);
    for (int i = 0; i < 5; ++i) CHECK(pp(i) == doctest::Approx(p(perm[i])).epsilon(1e-14));
  }
}

TEST_CASE("cross entropy: examples and errors") {
  RowVector p(2);
  p << 0.5, 0.5;
  CHECK(cross_entropy(p, 0) == doctest::Approx(0.693147).epsilon(1e-6));
  p << 1.0, 0.0;
  CHECK(cross_entropy(p, 0) == 0.0);
  CHECK(cross_entropy(p, 1) == doctest::Approx(-std::log(1e-12)));
  p << 0.25, 0.75;
  CHECK(cross_entropy(p, 1) == doctest::Approx(0.287682).epsilon(1e-6));
  CHECK_THROWS_AS(cross_entropy(p, 2), InputError);
  CHECK_THROWS_AS(cross_entropy(p, -1), InputError);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  RowVector x(4);
  x << 1, 3, 3, 2;
  CHECK(argmax(x) == 1);
}

TEST_CASE("adam: zero gradient is the identity") {
  BlockParams b("b");
  b.add("w", 2, 2).value << 1, 2, 3, 4;
  const Tensor2 before = b[0].value;
  adam_update(b, 5e-4, 1e-4);
  CHECK(b[0].value == before);
}

TEST_CASE("adam: first step moves by the learning rate") {
  BlockParams b("b");
  b.add("theta", 1, 1).value(0, 0) = 0.0;
  b[0].grad(0, 0) = 1.0;
  adam_update(b, 5e-4, 1e-4);
  // m_hat = v_hat = 1, so the step is lr / (1 + eps).
  CHECK(b[0].value(0, 0) == doctest::Approx(-5e-4 / (1.0 + 1e-8)).epsilon(1e-12));
  CHECK(b[0].grad(0, 0) == 0.0);
  CHECK(b.step == 1);
}

TEST_CASE("adam: repeated identical gradients move monotonically; decay shrinks steps") {
  BlockParams b("b");
  b.add("theta", 1, 1);
  double last = 0.0;
  double last_step = 1.0;
  for (int k = 0; k < 5; ++k) {
    b[0].grad(0, 0) = 2.0;
    adam_update(b, 1e-2, 0.5);
    const double now = b[0].value(0, 0);
    CHECK(now < last);
    const double step = last - now;
    CHECK(step < last_step);
    last_step = step;
    last = now;
  }
}

TEST_CASE("block params: shapes and zero moments") {
  BlockParams b("blk");
  auto& p = b.add("w", 3, 2);
  CHECK(p.grad.rows() == 3);
  CHECK(p.m.isZero());
  CHECK(p.v.isZero());
  CHECK(b.parameter_count() == 6);
  CHECK(&b.find("w") == &b[0]);
}

TEST_CASE("glorot init stays inside its bound") {
  Rng rng(1);
  Tensor2 w(30, 20);
  glorot_uniform(w, 30, 20, rng);
  const double bound = std::sqrt(6.0 / 50.0);
  CHECK(w.cwiseAbs().maxCoeff() <= bound);
  CHECK(w.cwiseAbs().maxCoeff() > 0.5 * bound);
}

TEST_CASE("finite differences: every block on a handful of seeds") {
  for (const auto& c : gradcases::all_cases()) {
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
      const GradCheckReport r = c.run(seed);
      INFO(c.name << " seed " << seed << " worst " << r.worst);
      CHECK(r.passed);
    }
  }
}

TEST_CASE("finite differences: a wrong gradient is caught") {
  Rng rng(1);
  Dense d("fc", 3, 2);
  d.init_glorot(rng);
  const Tensor2 x = random_matrix(2, 3, rng);
  Dense::Cache c;
  d.forward(x, &c);
  d.backward(c, Tensor2::Ones(2, 2));
  d.params()[0].grad(0, 0) += 0.1;
  std::vector<BlockParams*> blocks{&d.params()};
  const GradCheckReport r = finite_difference_check(blocks, [&] { return d.forward(x).sum(); }, 1e-4);
  CHECK_FALSE(r.passed);
}
