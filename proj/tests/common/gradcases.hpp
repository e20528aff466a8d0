#pragma once

// Seeded finite-difference scenarios shared by the unit tests and the
// acceptance binary. Each builds a random instance, runs one backward pass
// and compares every parameter gradient with central differences.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kpg/classifier/bigcn.hpp"
#include "kpg/crg/crg_model.hpp"
#include "kpg/ens/candidates.hpp"
#include "kpg/ens/ens_model.hpp"
#include "kpg/ens/state.hpp"
#include "kpg/nn/dense.hpp"
#include "kpg/nn/gcn.hpp"
#include "kpg/nn/gradcheck.hpp"
#include "kpg/nn/gru.hpp"
#include "kpg/nn/mlp.hpp"

namespace gradcases {

using namespace kpg;

inline Tensor2 uniform(Index r, Index c, Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor2 m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

inline std::vector<int> parents(int n, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(n), -1);
  for (int i = 1; i < n; ++i) p[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, i - 1)(rng);
  return p;
}

inline void randomize(std::vector<BlockParams*> blocks, Rng& rng, double scale = 0.5) {
  for (auto* b : blocks)
    for (auto& p : b->all()) p.value = uniform(p.value.rows(), p.value.cols(), rng, scale);
}

constexpr double kTolerance = 1e-4;

inline GradCheckReport dense(std::uint64_t seed) {
  Rng rng(seed);
  Dense d("dense", 5, 4);
  randomize({&d.params()}, rng);
  const Tensor2 x = uniform(3, 5, rng);
  const Tensor2 w = uniform(3, 4, rng);
  Dense::Cache c;
  d.forward(x, &c);
  d.backward(c, w);
  std::vector<BlockParams*> blocks{&d.params()};
  return finite_difference_check(blocks, [&] { return (d.forward(x).array() * w.array()).sum(); },
                                 kTolerance);
}

inline GradCheckReport mlp(std::uint64_t seed) {
  Rng rng(seed);
  Mlp m("mlp", {6, 5, 4, 3});
  randomize(m.blocks(), rng);
  const Tensor2 x = uniform(2, 6, rng);
  const Tensor2 w = uniform(2, 3, rng);
  Mlp::Cache c;
  m.forward(x, &c);
  m.backward(c, w);
  auto blocks = m.blocks();
  return finite_difference_check(blocks, [&] { return (m.forward(x).array() * w.array()).sum(); },
                                 kTolerance);
}

inline GradCheckReport gcn(std::uint64_t seed) {
  Rng rng(seed);
  const int n = 2 + static_cast<int>(seed % 6);
  GcnLayer g("gcn", 4, 3);
  randomize({&g.params()}, rng);
  const auto p = parents(n, rng);
  const Tensor2 a = normalized_adjacency(p, seed % 2 ? EdgeDirection::kTopDown : EdgeDirection::kBottomUp);
  const Tensor2 x = uniform(n, 4, rng);
  const Tensor2 w = uniform(n, 3, rng);
  GcnLayer::Cache c;
  g.forward(a, x, &c);
  g.backward(c, w);
  std::vector<BlockParams*> blocks{&g.params()};
  return finite_difference_check(blocks,
                                 [&] { return (g.forward(a, x).array() * w.array()).sum(); },
                                 kTolerance);
}

inline GradCheckReport gru_cell(std::uint64_t seed) {
  Rng rng(seed);
  GruCell cell("gru", 4, 3);
  randomize({&cell.params()}, rng);
  const RowVector x = uniform(1, 4, rng).row(0);
  const RowVector h = uniform(1, 3, rng).row(0);
  const RowVector w = uniform(1, 3, rng).row(0);
  GruCell::Cache c;
  cell.forward(x, h, &c);
  cell.backward(c, w);
  std::vector<BlockParams*> blocks{&cell.params()};
  return finite_difference_check(blocks, [&] { return cell.forward(x, h).dot(w); }, kTolerance);
}

inline GradCheckReport gru_sequence(std::uint64_t seed) {
  Rng rng(seed);
  GruEncoder enc("enc", 7, 3);
  randomize(enc.blocks(), rng);
  std::vector<int> tokens;
  for (int i = 0; i < 4; ++i) tokens.push_back(std::uniform_int_distribution<int>(0, 6)(rng));
  const RowVector w = uniform(1, 3, rng).row(0);
  GruEncoder::Cache c;
  enc.encode(tokens, &c);
  enc.backward(c, w);
  auto blocks = enc.blocks();
  return finite_difference_check(blocks, [&] { return enc.encode(tokens).dot(w); }, kTolerance);
}

inline GradCheckReport gru_decoder(std::uint64_t seed) {
  Rng rng(seed);
  GruDecoder dec("dec", 6, 5, 3);
  randomize(dec.blocks(), rng);
  const RowVector h = uniform(1, 3, rng).row(0);
  const int token = std::uniform_int_distribution<int>(0, 5)(rng);
  const RowVector wl = uniform(1, 5, rng).row(0);
  const RowVector wh = uniform(1, 3, rng).row(0);
  GruDecoder::StepCache c;
  dec.step(h, token, &c);
  dec.step_backward(c, wl, wh);
  auto blocks = dec.blocks();
  return finite_difference_check(blocks, [&] {
    const auto r = dec.step(h, token);
    return r.logits.dot(wl) + r.h_next.dot(wh);
  }, kTolerance);
}

inline ResponsePair random_pair(int vocab, Rng& rng) {
  auto seq = [&](int lo, int hi) {
    std::vector<int> s(static_cast<std::size_t>(std::uniform_int_distribution<int>(lo, hi)(rng)));
    for (auto& t : s) t = std::uniform_int_distribution<int>(0, vocab - 1)(rng);
    return s;
  };
  return {seq(0, 4), seq(1, 4), seq(1, 4)};
}

inline GradCheckReport cvae(std::uint64_t seed) {
  Rng rng(seed);
  CrgModel m(6, 4, 3);
  m.init(rng);
  randomize(m.blocks(), rng, 0.4);
  const ResponsePair pair = random_pair(6, rng);
  const RowVector noise = uniform(1, 3, rng).row(0);
  const double reward = 0.5 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  // The reconstruction target is a constant of the loss, so pin it for the
  // numeric side too.
  const RowVector target = m.gru1().encode(pair.response);
  m.pair_loss_backward(pair, reward, noise, 1.0, 1.0, &target);
  auto blocks = m.blocks();
  return finite_difference_check(
      blocks, [&] { return m.pair_loss(pair, reward, noise, 1.0, &target).total; }, kTolerance);
}

inline GradCheckReport bigcn(std::uint64_t seed) {
  Rng rng(seed);
  const int n = 1 + static_cast<int>(seed % 7);
  BiGcn model(5, 4, 3);
  model.init(rng);
  randomize(model.blocks(), rng);
  Graph g{parents(n, rng), uniform(n, 5, rng)};
  const int label = static_cast<int>(seed % 3);
  model.loss_backward(g, label);
  auto blocks = model.blocks();
  return finite_difference_check(blocks, [&] {
    const RowVector p = model.forward(g);
    return -std::log(p(label));
  }, kTolerance);
}

/// Random featurized candidate pool and a partial key graph grown by a few
/// random actions.
struct EnsScene {
  CandidateGraph pool;
  KeyGraphState key;
};

inline EnsScene ens_scene(int n, Index width, Rng& rng, int grow) {
  EnsScene s;
  const auto p = parents(n, rng);
  s.pool.parent = p;
  s.pool.children.assign(static_cast<std::size_t>(n), {});
  for (int i = 1; i < n; ++i) s.pool.children[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])].push_back(i);
  for (int i = 0; i < n; ++i) {
    s.pool.features.push_back(uniform(1, width, rng).row(0));
    s.pool.tokens.push_back({});
  }
  s.pool.generated.assign(static_cast<std::size_t>(n), false);
  s.key = KeyGraphState::initial(s.pool);
  for (int k = 0; k < grow; ++k) {
    const auto sets = candidate_sets(s.key, s.pool);
    if (sets.global.empty()) break;
    const int v = sets.global[std::uniform_int_distribution<std::size_t>(0, sets.global.size() - 1)(rng)];
    s.key = apply_action(s.key, v, s.pool);
  }
  return s;
}

inline GradCheckReport ens(std::uint64_t seed, EnsLossVariant variant) {
  Rng rng(seed);
  EnsModel model(4, 3, 2);
  model.init(rng);
  randomize(model.blocks(), rng);
  const int n = 4 + static_cast<int>(seed % 5);
  EnsScene s = ens_scene(n, 4, rng, static_cast<int>(seed % 3));
  CandidateChoice choice = choose_candidates(candidate_sets(s.key, s.pool), seed % 2 == 0);
  const std::size_t chosen = std::uniform_int_distribution<std::size_t>(0, choice.nodes.size() - 1)(rng);
  const KeyGraphState after = apply_action(s.key, choice.nodes[chosen], s.pool);
  std::uniform_real_distribution<double> u(0.2, 1.4);
  const double reward = u(rng);
  const double penalty = u(rng);
  const int label = static_cast<int>(seed % 2);
  EnsLossOptions opts;
  opts.variant = variant;
  opts.ce_weight = 0.7;
  opts.pg_weight = 1.3;
  model.loss_backward(s.key, choice, chosen, after, s.pool, reward, penalty, label, opts);
  auto blocks = model.blocks();
  return finite_difference_check(blocks, [&] {
    return model.loss(s.key, choice, chosen, after, s.pool, reward, penalty, label, opts).total;
  }, kTolerance);
}

struct NamedCase {
  std::string name;
  std::function<GradCheckReport(std::uint64_t)> run;
};

inline std::vector<NamedCase> all_cases() {
  return {
      {"dense", dense},
      {"mlp", mlp},
      {"gcn layer", gcn},
      {"gru cell", gru_cell},
      {"gru sequence", gru_sequence},
      {"gru decoder step", gru_decoder},
      {"cvae losses", cvae},
      {"bigcn", bigcn},
      {"ens head-ce", [](std::uint64_t s) { return ens(s, EnsLossVariant::kHeadCrossEntropy); }},
      {"ens action-nll", [](std::uint64_t s) { return ens(s, EnsLossVariant::kActionLikelihood); }},
  };
}

}  // namespace gradcases
