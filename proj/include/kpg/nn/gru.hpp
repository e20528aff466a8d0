#pragma once

#include <span>
#include <string>
#include <vector>

#include "kpg/nn/dense.hpp"

namespace kpg {

/// Trainable token lookup table.
class Embedding {
 public:
  Embedding() = default;
  Embedding(std::string name, Index vocab, Index width);

  Index vocab() const { return params_[0].value.rows(); }
  Index width() const { return params_[0].value.cols(); }

  /// Throws InputError for ids outside [0, vocab).
  RowVector lookup(int token) const;
  void backward(int token, const RowVector& dy);

  void init_glorot(Rng& rng);
  BlockParams& params() { return params_; }
  const BlockParams& params() const { return params_; }

 private:
  BlockParams params_;
};

/// Gated recurrent unit with gate order (reset, update, candidate):
///
///   r  = sigmoid(x Wx_r + bx_r + h Wh_r + bh_r)
///   z  = sigmoid(x Wx_z + bx_z + h Wh_z + bh_z)
///   n  = tanh(x Wx_n + bx_n + r * (h Wh_n + bh_n))
///   h' = (1 - z) * n + z * h
class GruCell {
 public:
  struct Cache {
    RowVector x;
    RowVector h;
    RowVector r;
    RowVector z;
    RowVector n;
    RowVector hn;  // h Wh_n + bh_n
  };

  GruCell() = default;
  GruCell(std::string name, Index in, Index hidden);

  Index in_width() const { return params_[0].value.rows(); }
  Index hidden() const { return params_[1].value.rows(); }

  RowVector forward(const RowVector& x, const RowVector& h, Cache* cache = nullptr) const;

  struct Grads {
    RowVector dx;
    RowVector dh;
  };
  Grads backward(const Cache& cache, const RowVector& dh_next);

  void init_glorot(Rng& rng);
  BlockParams& params() { return params_; }
  const BlockParams& params() const { return params_; }

 private:
  BlockParams params_;  // wx (in x 3h), wh (h x 3h), bx (1 x 3h), bh (1 x 3h)
};

/// Embedding + GRU over a token sequence; returns the final hidden state.
class GruEncoder {
 public:
  struct Cache {
    std::vector<int> tokens;
    std::vector<GruCell::Cache> steps;
  };

  GruEncoder() = default;
  GruEncoder(const std::string& name, Index vocab, Index hidden);

  Index vocab() const { return embedding_.vocab(); }
  Index hidden() const { return cell_.hidden(); }

  /// Empty sequences map to the zero state.
  RowVector encode(std::span<const int> tokens, Cache* cache = nullptr) const;
  void backward(const Cache& cache, const RowVector& dh_final);

  void init_glorot(Rng& rng);
  std::vector<BlockParams*> blocks() { return {&embedding_.params(), &cell_.params()}; }
  Embedding& embedding() { return embedding_; }
  GruCell& cell() { return cell_; }

 private:
  Embedding embedding_;
  GruCell cell_;
};

/// One decoding step: embed the previous token, advance the GRU, project the
/// new state onto output logits.
class GruDecoder {
 public:
  struct StepCache {
    int token = 0;
    GruCell::Cache cell;
    Dense::Cache out;
  };
  struct StepResult {
    RowVector logits;
    RowVector h_next;
  };

  GruDecoder() = default;
  /// `input_vocab` ids feed the embedding; `output_vocab` is the logit width.
  GruDecoder(const std::string& name, Index input_vocab, Index output_vocab, Index hidden);

  Index hidden() const { return cell_.hidden(); }
  Index output_vocab() const { return out_.out_width(); }

  StepResult step(const RowVector& h, int prev_token, StepCache* cache = nullptr) const;

  /// Backward through one step; returns dL/dh for the incoming state.
  RowVector step_backward(const StepCache& cache, const RowVector& dlogits,
                          const RowVector& dh_next);

  void init_glorot(Rng& rng);
  std::vector<BlockParams*> blocks() {
    return {&embedding_.params(), &cell_.params(), &out_.params()};
  }
  Embedding& embedding() { return embedding_; }
  GruCell& cell() { return cell_; }
  Dense& projection() { return out_; }

 private:
  Embedding embedding_;
  GruCell cell_;
  Dense out_;
};

}  // namespace kpg
