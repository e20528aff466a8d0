#include "kpg/nn/gru.hpp"

#include <cmath>

#include "kpg/errors.hpp"

namespace kpg {

namespace {

RowVector sigmoid_row(const RowVector& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

}  // namespace

Embedding::Embedding(std::string name, Index vocab, Index width) : params_(std::move(name)) {
  params_.add("table", vocab, width);
}

RowVector Embedding::lookup(int token) const {
  if (token < 0 || token >= vocab()) {
    throw InputError("embedding '" + params_.name() + "': token id " + std::to_string(token) +
                     " outside vocabulary of size " + std::to_string(vocab()));
  }
  return params_[0].value.row(token);
}

void Embedding::backward(int token, const RowVector& dy) { params_[0].grad.row(token) += dy; }

void Embedding::init_glorot(Rng& rng) {
  glorot_uniform(params_[0].value, params_[0].value.rows(), params_[0].value.cols(), rng);
}

GruCell::GruCell(std::string name, Index in, Index hidden) : params_(std::move(name)) {
  params_.add("wx", in, 3 * hidden);
  params_.add("wh", hidden, 3 * hidden);
  params_.add("bx", 1, 3 * hidden);
  params_.add("bh", 1, 3 * hidden);
}

RowVector GruCell::forward(const RowVector& x, const RowVector& h, Cache* cache) const {
  const Index hd = hidden();
  if (x.size() != in_width() || h.size() != hd) {
    throw DimensionError("gru block '" + params_.name() + "': got input width " +
                         std::to_string(x.size()) + " and state width " +
                         std::to_string(h.size()));
  }
  RowVector gx = x * params_[0].value + params_[2].value;
  RowVector gh = h * params_[1].value + params_[3].value;
  RowVector r = sigmoid_row(gx.segment(0, hd) + gh.segment(0, hd));
  RowVector z = sigmoid_row(gx.segment(hd, hd) + gh.segment(hd, hd));
  RowVector hn = gh.segment(2 * hd, hd);
  RowVector n = (gx.segment(2 * hd, hd).array() + r.array() * hn.array()).tanh().matrix();
  RowVector out = ((1.0 - z.array()) * n.array() + z.array() * h.array()).matrix();
  if (cache) {
    cache->x = x;
    cache->h = h;
    cache->r = std::move(r);
    cache->z = std::move(z);
    cache->n = std::move(n);
    cache->hn = std::move(hn);
  }
  return out;
}

GruCell::Grads GruCell::backward(const Cache& c, const RowVector& dh_next) {
  const Index hd = hidden();
  const auto z = c.z.array();
  const auto r = c.r.array();
  const auto n = c.n.array();
  const auto d = dh_next.array();

  RowVector dn_pre = (d * (1.0 - z) * (1.0 - n * n)).matrix();
  RowVector dz_pre = (d * (c.h.array() - n) * z * (1.0 - z)).matrix();
  RowVector dr_pre = (dn_pre.array() * c.hn.array() * r * (1.0 - r)).matrix();

  RowVector dgx(3 * hd);
  dgx << dr_pre, dz_pre, dn_pre;
  RowVector dgh(3 * hd);
  dgh << dr_pre, dz_pre, (dn_pre.array() * r).matrix();

  params_[0].grad.noalias() += c.x.transpose() * dgx;
  params_[1].grad.noalias() += c.h.transpose() * dgh;
  params_[2].grad += dgx;
  params_[3].grad += dgh;

  Grads g;
  g.dx = dgx * params_[0].value.transpose();
  g.dh = (d * z).matrix() + dgh * params_[1].value.transpose();
  return g;
}

void GruCell::init_glorot(Rng& rng) {
  const Index hd = hidden();
  glorot_uniform(params_[0].value, in_width(), 3 * hd, rng);
  glorot_uniform(params_[1].value, hd, 3 * hd, rng);
  params_[2].value.setZero();
  params_[3].value.setZero();
}

GruEncoder::GruEncoder(const std::string& name, Index vocab, Index hidden)
    : embedding_(name + ".embedding", vocab, hidden), cell_(name + ".cell", hidden, hidden) {}

RowVector GruEncoder::encode(std::span<const int> tokens, Cache* cache) const {
  RowVector h = RowVector::Zero(hidden());
  if (cache) {
    cache->tokens.assign(tokens.begin(), tokens.end());
    cache->steps.assign(tokens.size(), {});
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    h = cell_.forward(embedding_.lookup(tokens[i]), h, cache ? &cache->steps[i] : nullptr);
  }
  return h;
}

void GruEncoder::backward(const Cache& cache, const RowVector& dh_final) {
  RowVector dh = dh_final;
  for (std::size_t i = cache.steps.size(); i-- > 0;) {
    auto g = cell_.backward(cache.steps[i], dh);
    embedding_.backward(cache.tokens[i], g.dx);
    dh = std::move(g.dh);
  }
}

void GruEncoder::init_glorot(Rng& rng) {
  embedding_.init_glorot(rng);
  cell_.init_glorot(rng);
}

GruDecoder::GruDecoder(const std::string& name, Index input_vocab, Index output_vocab,
                       Index hidden)
    : embedding_(name + ".embedding", input_vocab, hidden),
      cell_(name + ".cell", hidden, hidden),
      out_(name + ".projection", hidden, output_vocab) {}

GruDecoder::StepResult GruDecoder::step(const RowVector& h, int prev_token,
                                        StepCache* cache) const {
  StepResult r;
  if (cache) cache->token = prev_token;
  r.h_next = cell_.forward(embedding_.lookup(prev_token), h, cache ? &cache->cell : nullptr);
  r.logits = out_.forward(r.h_next, cache ? &cache->out : nullptr);
  return r;
}

RowVector GruDecoder::step_backward(const StepCache& cache, const RowVector& dlogits,
                                    const RowVector& dh_next) {
  RowVector dh_out = out_.backward(cache.out, dlogits);
  dh_out += dh_next;
  auto g = cell_.backward(cache.cell, dh_out);
  embedding_.backward(cache.token, g.dx);
  return g.dh;
}

void GruDecoder::init_glorot(Rng& rng) {
  embedding_.init_glorot(rng);
  cell_.init_glorot(rng);
  out_.init_glorot(rng);
}

}  // namespace kpg
