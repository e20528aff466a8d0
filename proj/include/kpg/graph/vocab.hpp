#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kpg/graph/tree.hpp"

namespace kpg {

/// Lowercases ASCII and splits on whitespace and ASCII punctuation. Bytes
/// >= 0x80 are kept inside tokens so UTF-8 text survives intact.
std::vector<std::string> tokenize(std::string_view text);

/// Token <-> id map with document frequencies. Ids are assigned by
/// descending document frequency, ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> tokens, std::vector<int> document_frequency,
             std::size_t documents);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  /// -1 when the token is not in the vocabulary.
  int id(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  int document_frequency(int id) const { return df_.at(static_cast<std::size_t>(id)); }
  std::size_t documents() const { return documents_; }

  /// ln((1 + N) / (1 + df)) + 1
  double idf(int id) const { return idf_.at(static_cast<std::size_t>(id)); }

  /// Maps text to in-vocabulary ids, dropping unknown tokens.
  std::vector<int> encode(std::string_view text) const;
  std::string decode(std::span<const int> ids) const;

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<int>& document_frequencies() const { return df_; }

 private:
  std::vector<std::string> tokens_;
  std::vector<int> df_;
  std::vector<double> idf_;
  std::size_t documents_ = 0;
  std::unordered_map<std::string, int> index_;
};

/// Top-`max_size` tokens by document frequency over the posts of `trees`
/// (each post is one document). Throws InputError when max_size < 1.
Vocabulary build_vocab(std::span<const PropagationTree> trees, std::size_t max_size);

/// Same, over a plain list of documents.
Vocabulary build_vocab(std::span<const std::string> documents, std::size_t max_size);

/// One TF-IDF row (raw counts times idf), L2-normalized; all-zero stays zero.
RowVector tfidf_row(std::span<const int> ids, const Vocabulary& vocab);

/// Fills post tokens from raw text and the feature matrix (one row per post).
void featurize(PropagationTree& tree, const Vocabulary& vocab);

/// Returns the feature matrix without touching the tree.
Tensor2 featurize_matrix(const PropagationTree& tree, const Vocabulary& vocab);

}  // namespace kpg
