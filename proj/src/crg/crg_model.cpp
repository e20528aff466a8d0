#include "kpg/crg/crg_model.hpp"

#include <cmath>

#include "kpg/errors.hpp"
#include "kpg/nn/functional.hpp"

namespace kpg {

namespace {

constexpr double kLogVarLimit = 10.0;

RowVector clamp_log_var(const RowVector& raw) {
  return raw.cwiseMax(-kLogVarLimit).cwiseMin(kLogVarLimit);
}

void mask_clamped(RowVector& grad, const RowVector& raw) {
  for (Index i = 0; i < raw.size(); ++i) {
    if (raw(i) < -kLogVarLimit || raw(i) > kLogVarLimit) grad(i) = 0.0;
  }
}

RowVector concat(const RowVector& a, const RowVector& b) {
  RowVector out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace

RowVector gaussian_kl(const LatentGaussian& q, const LatentGaussian& p) {
  const auto var_q = q.log_var.array().exp();
  const auto var_p = p.log_var.array().exp();
  const auto diff = q.mean.array() - p.mean.array();
  return (0.5 * (p.log_var.array() - q.log_var.array() + (var_q + diff * diff) / var_p - 1.0))
      .matrix();
}

RowVector sample_latent(const LatentGaussian& g, const RowVector& noise) {
  if (noise.size() != g.mean.size()) {
    throw DimensionError("sample_latent: noise width " + std::to_string(noise.size()) +
                         ", latent width " + std::to_string(g.mean.size()));
  }
  return g.mean + ((0.5 * g.log_var.array()).exp() * noise.array()).matrix();
}

// Tanh hidden layers: with ReLU, per-event Adam steps could kill every unit of MLP3 and
// leave generation independent of its context.
CrgModel::CrgModel(Index vocab, Index hidden, Index z_dim)
    : gru1_("crg.gru1", vocab, hidden),
      gru2_("crg.gru2", vocab, hidden),
      mu_("crg.mlp1", {3 * hidden, hidden, z_dim}, Mlp::Activation::tanh),
      log_var_("crg.mlp2", {3 * hidden, hidden, z_dim}, Mlp::Activation::tanh),
      decoder_("crg.mlp3", {z_dim + 2 * hidden, hidden, hidden}, Mlp::Activation::tanh),
      prior_("crg.mlp4", {2 * hidden, hidden, 2 * z_dim}, Mlp::Activation::tanh),
      text_decoder_("crg.decoder", vocab + 2, vocab + 1, hidden) {}

void CrgModel::init(Rng& rng) {
  gru1_.init_glorot(rng);
  gru2_.init_glorot(rng);
  mu_.init_glorot(rng);
  log_var_.init_glorot(rng);
  decoder_.init_glorot(rng);
  prior_.init_glorot(rng);
  text_decoder_.init_glorot(rng);
}

RowVector CrgModel::encode_post(std::span<const int> tokens) const {
  return gru1_.encode(tokens);
}

RowVector CrgModel::encode_root(std::span<const int> tokens) const { return gru2_.encode(tokens); }

RowVector CrgModel::encode_context(std::span<const int> context, std::span<const int> root) const {
  return concat(gru1_.encode(context), gru2_.encode(root));
}

PairEncoding CrgModel::encode_pair(std::span<const int> context, std::span<const int> root,
                                   std::span<const int> response) const {
  return {encode_context(context, root), gru1_.encode(response)};
}

LatentGaussian CrgModel::posterior(const RowVector& context, const RowVector& response) const {
  const RowVector in = concat(context, response);
  return {mu_.forward(in), clamp_log_var(log_var_.forward(in))};
}

LatentGaussian CrgModel::prior(const RowVector& context) const {
  const RowVector out = prior_.forward(context);
  return {out.head(z_dim()), clamp_log_var(out.tail(z_dim()))};
}

RowVector CrgModel::decode_embedding(const RowVector& z, const RowVector& context) const {
  return decoder_.forward(concat(z, context));
}

std::vector<int> CrgModel::decode_tokens(const RowVector& embedding, int max_len) const {
  if (max_len < 1) throw InputError("decode_tokens: max_len must be >= 1");
  std::vector<int> out;
  RowVector h = embedding;
  int prev = start_token();
  while (static_cast<int>(out.size()) < max_len) {
    auto step = text_decoder_.step(h, prev);
    const int tok = static_cast<int>(argmax(step.logits));
    if (tok == end_token()) break;
    out.push_back(tok);
    prev = tok;
    h = std::move(step.h_next);
  }
  return out;
}

std::vector<int> CrgModel::reconstruct(const ResponsePair& pair, int max_len) const {
  const PairEncoding enc = encode_pair(pair.context, pair.root, pair.response);
  const LatentGaussian q = posterior(enc.context, enc.response);
  return decode_tokens(decode_embedding(q.mean, enc.context), max_len);
}

std::vector<int> CrgModel::generate(std::span<const int> context, std::span<const int> root,
                                    int max_len, Rng& rng) const {
  const RowVector h_u = encode_context(context, root);
  const LatentGaussian p = prior(h_u);
  std::normal_distribution<double> normal(0.0, 1.0);
  RowVector noise(z_dim());
  for (Index i = 0; i < noise.size(); ++i) noise(i) = normal(rng);
  return decode_tokens(decode_embedding(sample_latent(p, noise), h_u), max_len);
}

CrgLossParts CrgModel::compute(const ResponsePair& pair, double reward, const RowVector& noise,
                               double decoder_weight, double scale, bool backward,
                               const RowVector* target) {
  const Index h = hidden();
  const Index zd = z_dim();
  GruEncoder::Cache cu, cr, cv;
  const RowVector hu = concat(gru1_.encode(pair.context, &cu), gru2_.encode(pair.root, &cr));
  const RowVector hv = gru1_.encode(pair.response, &cv);
  const RowVector qin = concat(hu, hv);

  Mlp::Cache cmu, clv, cprior, cdec;
  const RowVector mu_q = mu_.forward(qin, &cmu);
  const RowVector lv_q_raw = log_var_.forward(qin, &clv);
  const RowVector prior_out = prior_.forward(hu, &cprior);
  const LatentGaussian q{mu_q, clamp_log_var(lv_q_raw)};
  const RowVector lv_p_raw = prior_out.tail(zd);
  const LatentGaussian p{prior_out.head(zd), clamp_log_var(lv_p_raw)};

  const RowVector sd = (0.5 * q.log_var.array()).exp().matrix();
  const RowVector z = sample_latent(q, noise);
  const RowVector hhat = decoder_.forward(concat(z, hu), &cdec);
  const RowVector diff = hhat - (target ? *target : hv);

  CrgLossParts parts;
  parts.reconstruction = diff.squaredNorm() / static_cast<double>(h);
  parts.kl = gaussian_kl(q, p).sum();
  parts.cvae = reward * (parts.reconstruction + parts.kl);

  // Teacher-forced decoding of the response from the reconstructed embedding, the same
  // state generation starts from.
  std::vector<GruDecoder::StepCache> dec_caches;
  std::vector<RowVector> dec_probs;
  std::vector<int> targets(pair.response.begin(), pair.response.end());
  targets.push_back(end_token());
  if (decoder_weight != 0.0) {
    RowVector state = hhat;
    int prev = start_token();
    dec_caches.resize(targets.size());
    double ce = 0.0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      auto step = text_decoder_.step(state, prev, &dec_caches[k]);
      dec_probs.push_back(softmax(step.logits));
      ce += cross_entropy(dec_probs.back(), targets[k]);
      state = std::move(step.h_next);
      prev = targets[k];
    }
    parts.decoder = ce / static_cast<double>(targets.size());
  }
  parts.total = parts.cvae + decoder_weight * parts.decoder;
  if (!backward) return parts;

  const double w = scale * reward;
  RowVector dhhat = diff * (2.0 * w / static_cast<double>(h));
  if (decoder_weight != 0.0) {
    const double dw = scale * decoder_weight / static_cast<double>(targets.size());
    RowVector dh = RowVector::Zero(h);
    for (std::size_t k = targets.size(); k-- > 0;) {
      dh = text_decoder_.step_backward(dec_caches[k],
                                       softmax_cross_entropy_grad(dec_probs[k], targets[k]) * dw, dh);
    }
    dhhat += dh;
  }
  const RowVector ddin = decoder_.backward(cdec, dhhat);
  const RowVector dz = ddin.head(zd);
  RowVector dhu = ddin.tail(2 * h);

  const auto var_q = q.log_var.array().exp();
  const auto var_p = p.log_var.array().exp();
  const auto mdiff = q.mean.array() - p.mean.array();
  const RowVector dmu_q = dz + (w * mdiff / var_p).matrix();
  RowVector dlv_q = (dz.array() * noise.array() * 0.5 * sd.array() +
                     w * 0.5 * (var_q / var_p - 1.0)).matrix();
  mask_clamped(dlv_q, lv_q_raw);
  RowVector dlv_p = (w * 0.5 * (1.0 - (var_q + mdiff * mdiff) / var_p)).matrix();
  mask_clamped(dlv_p, lv_p_raw);
  const RowVector dmu_p = (-w * mdiff / var_p).matrix();

  RowVector dqin = mu_.backward(cmu, dmu_q);
  dqin += log_var_.backward(clv, dlv_q);
  dhu += prior_.backward(cprior, concat(dmu_p, dlv_p));
  dhu += dqin.head(2 * h);
  RowVector dhv = dqin.tail(h);

  gru1_.backward(cu, dhu.head(h));
  gru2_.backward(cr, dhu.tail(h));
  gru1_.backward(cv, dhv);
  return parts;
}

CrgLossParts CrgModel::pair_loss(const ResponsePair& pair, double reward, const RowVector& noise,
                                 double decoder_weight, const RowVector* target) const {
  return const_cast<CrgModel*>(this)->compute(pair, reward, noise, decoder_weight, 1.0, false,
                                              target);
}

CrgLossParts CrgModel::pair_loss_backward(const ResponsePair& pair, double reward,
                                          const RowVector& noise, double decoder_weight,
                                          double scale, const RowVector* target) {
  return compute(pair, reward, noise, decoder_weight, scale, true, target);
}

std::vector<BlockParams*> CrgModel::blocks() {
  std::vector<BlockParams*> out;
  for (auto* b : gru1_.blocks()) out.push_back(b);
  for (auto* b : gru2_.blocks()) out.push_back(b);
  for (auto* m : {&mu_, &log_var_, &decoder_, &prior_}) {
    for (auto* b : m->blocks()) out.push_back(b);
  }
  for (auto* b : text_decoder_.blocks()) out.push_back(b);
  return out;
}

std::vector<const BlockParams*> CrgModel::blocks() const {
  auto mut = const_cast<CrgModel*>(this)->blocks();
  return {mut.begin(), mut.end()};
}

double reward_crg(double reconstructed_score, double original_score) {
  return std::exp(-(reconstructed_score - original_score));
}

double reward_crg(const BiGcn& reward_model, const CrgModel& crg, const KeyGraphState& key,
                  const CandidateGraph& pool, const Vocabulary& vocab, int label, int max_len) {
  Graph reconstructed = key.graph;
  // Same arithmetic as CrgModel::reconstruct, with each post encoded once.
  std::vector<RowVector> enc;
  enc.reserve(static_cast<std::size_t>(key.size()));
  for (int node : key.nodes) enc.push_back(crg.encode_post(pool.tokens[static_cast<std::size_t>(node)]));
  const RowVector root_enc = crg.encode_root(pool.tokens.front());
  for (int k = 1; k < key.size(); ++k) {
    const auto u = static_cast<std::size_t>(key.graph.parent[static_cast<std::size_t>(k)]);
    RowVector context(enc[u].size() + root_enc.size());
    context << enc[u], root_enc;
    const LatentGaussian q = crg.posterior(context, enc[static_cast<std::size_t>(k)]);
    reconstructed.features.row(k) =
        tfidf_row(crg.decode_tokens(crg.decode_embedding(q.mean, context), max_len), vocab);
  }
  return reward_crg(reward_model.forward(reconstructed)(label),
                    reward_model.forward(key.graph)(label));
}

std::vector<ResponsePair> harvest_pairs(const KeyGraphState& key, const CandidateGraph& pool) {
  std::vector<ResponsePair> pairs;
  const auto& root_tokens = pool.tokens.front();
  for (int k = 1; k < key.size(); ++k) {
    const auto v = static_cast<std::size_t>(key.nodes[static_cast<std::size_t>(k)]);
    if (pool.generated[v]) continue;
    const auto u = static_cast<std::size_t>(
        key.nodes[static_cast<std::size_t>(key.graph.parent[static_cast<std::size_t>(k)])]);
    pairs.push_back({pool.tokens[u], root_tokens, pool.tokens[v]});
  }
  return pairs;
}

void generate_responses(CandidateGraph& pool, const KeyGraphState& key, const CrgModel& crg,
                        const Vocabulary& vocab, int count, int max_len, Rng& rng) {
  if (key.size() == 0) return;
  std::uniform_int_distribution<int> pick(0, key.size() - 1);
  for (int i = 0; i < count; ++i) {
    const int context = key.nodes[static_cast<std::size_t>(pick(rng))];
    auto tokens = crg.generate(pool.tokens[static_cast<std::size_t>(context)], pool.tokens.front(),
                               max_len, rng);
    RowVector row = tfidf_row(tokens, vocab);
    pool.add_generated(context, std::move(tokens), std::move(row));
  }
}

}  // namespace kpg
