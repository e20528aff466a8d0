#include "kpg/graph/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "kpg/errors.hpp"

namespace kpg {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool keep = c >= 0x80 || std::isalnum(c) || c == '_';
    if (keep) {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<int> document_frequency,
                       std::size_t documents)
    : tokens_(std::move(tokens)), df_(std::move(document_frequency)), documents_(documents) {
  if (tokens_.size() != df_.size()) throw InputError("vocabulary: token/df length mismatch");
  idf_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    index_.emplace(tokens_[i], static_cast<int>(i));
    idf_.push_back(std::log((1.0 + static_cast<double>(documents_)) / (1.0 + df_[i])) + 1.0);
  }
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> Vocabulary::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& tok : tokenize(text)) {
    const int i = id(tok);
    if (i >= 0) ids.push_back(i);
  }
  return ids;
}

std::string Vocabulary::decode(std::span<const int> ids) const {
  std::string out;
  for (int i : ids) {
    if (!out.empty()) out.push_back(' ');
    out += token(i);
  }
  return out;
}

Vocabulary build_vocab(std::span<const std::string> documents, std::size_t max_size) {
  if (max_size < 1) throw InputError("build_vocab: size cap must be at least 1");
  std::map<std::string, int> df;
  for (const auto& doc : documents) {
    auto toks = tokenize(doc);
    std::set<std::string> unique(toks.begin(), toks.end());
    for (const auto& t : unique) ++df[t];
  }
  std::vector<std::pair<std::string, int>> ranked(df.begin(), df.end());
  // std::map iteration is already lexicographic, so a stable sort on df keeps ties ordered.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_size) ranked.resize(max_size);
  std::vector<std::string> tokens;
  std::vector<int> freq;
  for (auto& [t, f] : ranked) {
    tokens.push_back(t);
    freq.push_back(f);
  }
  return Vocabulary(std::move(tokens), std::move(freq), documents.size());
}

Vocabulary build_vocab(std::span<const PropagationTree> trees, std::size_t max_size) {
  std::vector<std::string> docs;
  for (const auto& t : trees) {
    for (const auto& p : t.posts) docs.push_back(p.raw_text);
  }
  return build_vocab(docs, max_size);
}

RowVector tfidf_row(std::span<const int> ids, const Vocabulary& vocab) {
  RowVector row = RowVector::Zero(static_cast<Index>(vocab.size()));
  for (int i : ids) row(i) += 1.0;
  for (Index j = 0; j < row.size(); ++j) {
    if (row(j) != 0.0) row(j) *= vocab.idf(static_cast<int>(j));
  }
  const double norm = row.norm();
  if (norm > 0.0) row /= norm;
  return row;
}

Tensor2 featurize_matrix(const PropagationTree& tree, const Vocabulary& vocab) {
  Tensor2 x(static_cast<Index>(tree.size()), static_cast<Index>(vocab.size()));
  for (std::size_t i = 0; i < tree.size(); ++i) {
    x.row(static_cast<Index>(i)) = tfidf_row(vocab.encode(tree.posts[i].raw_text), vocab);
  }
  return x;
}

void featurize(PropagationTree& tree, const Vocabulary& vocab) {
  tree.features.resize(static_cast<Index>(tree.size()), static_cast<Index>(vocab.size()));
  for (std::size_t i = 0; i < tree.size(); ++i) {
    auto& post = tree.posts[i];
    post.tokens = vocab.encode(post.raw_text);
    tree.features.row(static_cast<Index>(i)) = tfidf_row(post.tokens, vocab);
  }
}

}  // namespace kpg
