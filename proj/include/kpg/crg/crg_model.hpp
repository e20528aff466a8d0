#pragma once

#include <span>
#include <vector>

#include "kpg/classifier/bigcn.hpp"
#include "kpg/ens/state.hpp"
#include "kpg/graph/vocab.hpp"
#include "kpg/nn/gru.hpp"
#include "kpg/nn/mlp.hpp"

namespace kpg {

/// Diagonal Gaussian parameterized by its mean and log variance.
struct LatentGaussian {
  RowVector mean;
  RowVector log_var;
};

struct PairEncoding {
  RowVector context;   // GRU1(text(u)) || GRU2(text(r)), width 2h
  RowVector response;  // GRU1(text(v)), width h
};

/// One context/response training example (token ids).
struct ResponsePair {
  std::vector<int> context;
  std::vector<int> root;
  std::vector<int> response;
};

struct CrgLossParts {
  double reconstruction = 0.0;  // mean squared error of the response embedding
  double kl = 0.0;              // KL(q(z|h_u,h_v) || p(z|h_u)), summed over dims
  double decoder = 0.0;         // teacher-forced token cross-entropy, mean per step
  double cvae = 0.0;            // reward * (reconstruction + kl)
  double total = 0.0;           // cvae + decoder_weight * decoder
};

/// Closed-form KL between diagonal Gaussians, one entry per dimension.
RowVector gaussian_kl(const LatentGaussian& q, const LatentGaussian& p);

/// z' = mean + exp(log_var / 2) * noise
RowVector sample_latent(const LatentGaussian& g, const RowVector& noise);

/// Candidate response generator: a conditional VAE over response embeddings
/// plus a GRU decoder that turns an embedding back into tokens.
///
/// Token ids [0, vocab) are dataset words; `end_token()` = vocab ends a
/// sequence and `start_token()` = vocab + 1 seeds decoding.
class CrgModel {
 public:
  CrgModel() = default;
  CrgModel(Index vocab, Index hidden, Index z_dim);

  void init(Rng& rng);

  Index vocab() const { return gru1_.vocab(); }
  Index hidden() const { return gru1_.hidden(); }
  Index z_dim() const { return mu_.out_width(); }
  int end_token() const { return static_cast<int>(vocab()); }
  int start_token() const { return static_cast<int>(vocab()) + 1; }

  /// GRU1 over a post, GRU2 over the root text.
  RowVector encode_post(std::span<const int> tokens) const;
  RowVector encode_root(std::span<const int> tokens) const;
  RowVector encode_context(std::span<const int> context, std::span<const int> root) const;
  PairEncoding encode_pair(std::span<const int> context, std::span<const int> root,
                           std::span<const int> response) const;

  /// q(z | h_u, h_v): means from MLP1, log variances from MLP2.
  LatentGaussian posterior(const RowVector& context, const RowVector& response) const;
  /// p(z | h_u) from the prior network MLP4.
  LatentGaussian prior(const RowVector& context) const;
  /// MLP3(z' || h_u)
  RowVector decode_embedding(const RowVector& z, const RowVector& context) const;
  /// Greedy decoding with `embedding` as the initial state, from the start
  /// token until the end token or max_len words.
  std::vector<int> decode_tokens(const RowVector& embedding, int max_len) const;

  /// Reconstructs a response from the posterior mean (no sampling noise).
  std::vector<int> reconstruct(const ResponsePair& pair, int max_len) const;

  /// Generates a response for a context from the prior.
  std::vector<int> generate(std::span<const int> context, std::span<const int> root,
                            int max_len, Rng& rng) const;

  /// Loss of one pair with fixed posterior noise. The target embedding
  /// GRU1(v) is treated as a constant in the reconstruction term; the decoder
  /// term trains GRU1 and the token decoder as an autoencoder. A non-null
  /// `target` replaces GRU1(v) as the reconstruction target.
  CrgLossParts pair_loss(const ResponsePair& pair, double reward, const RowVector& noise,
                         double decoder_weight, const RowVector* target = nullptr) const;
  CrgLossParts pair_loss_backward(const ResponsePair& pair, double reward, const RowVector& noise,
                                  double decoder_weight, double scale = 1.0,
                                  const RowVector* target = nullptr);

  std::vector<BlockParams*> blocks();
  std::vector<const BlockParams*> blocks() const;

  GruEncoder& gru1() { return gru1_; }
  GruEncoder& gru2() { return gru2_; }
  Mlp& mean_net() { return mu_; }
  Mlp& log_var_net() { return log_var_; }
  Mlp& embedding_decoder() { return decoder_; }
  Mlp& prior_net() { return prior_; }
  GruDecoder& text_decoder() { return text_decoder_; }

 private:
  CrgLossParts compute(const ResponsePair& pair, double reward, const RowVector& noise,
                       double decoder_weight, double scale, bool backward,
                       const RowVector* target);

  GruEncoder gru1_;
  GruEncoder gru2_;
  Mlp mu_;
  Mlp log_var_;
  Mlp decoder_;
  Mlp prior_;
  GruDecoder text_decoder_;
};

/// exp(-(f(g')[y] - f(g)[y]))
double reward_crg(double reconstructed_score, double original_score);

/// Scores the key graph with original and reconstructed non-root features
/// under the frozen classifier and returns the reward above.
double reward_crg(const BiGcn& reward_model, const CrgModel& crg, const KeyGraphState& key,
                  const CandidateGraph& pool, const Vocabulary& vocab, int label, int max_len);

/// Context/response pairs along the edges of a key graph whose response is an
/// original post.
std::vector<ResponsePair> harvest_pairs(const KeyGraphState& key, const CandidateGraph& pool);

/// Tops up the candidate pool with `count` generated responses. Context nodes
/// are drawn uniformly from the key graph; each response is sampled from the
/// prior, decoded to tokens and featurized with `vocab`.
void generate_responses(CandidateGraph& pool, const KeyGraphState& key, const CrgModel& crg,
                        const Vocabulary& vocab, int count, int max_len, Rng& rng);

}  // namespace kpg
