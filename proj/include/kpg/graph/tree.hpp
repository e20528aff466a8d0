#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kpg/graph/graph.hpp"

namespace kpg {

struct Post {
  std::string id;
  std::optional<std::string> parent_id;
  double time_offset_min = 0.0;
  std::string raw_text;
  /// Vocabulary ids; filled by featurize once a vocabulary exists.
  std::vector<int> tokens;
};

/// One event: a source post plus its comment/retweet tree. Posts are stored
/// root first in topological order, so parent[i] < i for every non-root i.
struct PropagationTree {
  std::string event_id;
  int label = 0;
  std::vector<Post> posts;
  std::vector<int> parent;
  Tensor2 features;

  std::size_t size() const { return posts.size(); }
  const Post& root() const { return posts.front(); }
  std::vector<std::pair<int, int>> edges() const;

  /// Structure plus features, ready for the GCN models.
  Graph graph() const { return Graph{parent, features}; }
};

/// Builds a tree from unordered posts: validates structure and orders posts
/// topologically, breaking ties by (time_offset_min, id).
/// Throws MalformedEventError on orphans, cycles, duplicate ids or root problems.
PropagationTree make_tree(std::string event_id, int label, std::vector<Post> posts);

/// Re-checks every structural invariant of an existing tree.
void validate_tree(const PropagationTree& tree);

}  // namespace kpg
