#include "kpg/graph/tree.hpp"

#include <cmath>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "kpg/errors.hpp"

namespace kpg {

std::vector<std::pair<int, int>> PropagationTree::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(parent.size());
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] >= 0) out.emplace_back(parent[i], static_cast<int>(i));
  }
  return out;
}

PropagationTree make_tree(std::string event_id, int label, std::vector<Post> posts) {
  if (posts.empty()) throw MalformedEventError(event_id, "no posts");
  if (label < 0) throw MalformedEventError(event_id, "negative label");

  std::unordered_map<std::string, std::size_t> index;
  int root = -1;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    const Post& p = posts[i];
    if (!index.emplace(p.id, i).second) {
      throw MalformedEventError(event_id, "duplicate post id '" + p.id + "'");
    }
    if (!std::isfinite(p.time_offset_min) || p.time_offset_min < 0.0) {
      throw MalformedEventError(event_id, "post '" + p.id + "' has an invalid time offset");
    }
    if (!p.parent_id) {
      if (root != -1) throw MalformedEventError(event_id, "more than one root post");
      root = static_cast<int>(i);
    }
  }
  if (root == -1) throw MalformedEventError(event_id, "no root post (parent_id null)");
  if (posts[root].time_offset_min != 0.0) {
    throw MalformedEventError(event_id, "root post must have time_offset_min 0");
  }

  std::vector<std::vector<std::size_t>> children(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) {
    const auto& pid = posts[i].parent_id;
    if (!pid) continue;
    auto it = index.find(*pid);
    if (it == index.end()) {
      throw MalformedEventError(event_id,
                                "post '" + posts[i].id + "' references missing parent '" + *pid + "'");
    }
    if (it->second == i) {
      throw MalformedEventError(event_id, "post '" + posts[i].id + "' is its own parent");
    }
    children[it->second].push_back(i);
  }

  // Kahn-style expansion from the root, always emitting the earliest
  // available post; anything never reached sits on a cycle.
  using Key = std::tuple<double, std::string, std::size_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> frontier;
  frontier.emplace(0.0, posts[root].id, static_cast<std::size_t>(root));
  std::vector<std::size_t> order;
  order.reserve(posts.size());
  while (!frontier.empty()) {
    auto [t, id, i] = frontier.top();
    frontier.pop();
    order.push_back(i);
    for (std::size_t c : children[i]) frontier.emplace(posts[c].time_offset_min, posts[c].id, c);
  }
  if (order.size() != posts.size()) {
    throw MalformedEventError(event_id, "posts contain a cycle unreachable from the root");
  }

  std::vector<int> position(posts.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = static_cast<int>(k);

  PropagationTree tree;
  tree.event_id = std::move(event_id);
  tree.label = label;
  tree.parent.assign(posts.size(), -1);
  tree.posts.reserve(posts.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    Post& p = posts[order[k]];
    if (p.parent_id) tree.parent[k] = position[index.at(*p.parent_id)];
    tree.posts.push_back(std::move(p));
  }
  return tree;
}

void validate_tree(const PropagationTree& tree) {
  const auto& id = tree.event_id;
  if (tree.posts.empty()) throw MalformedEventError(id, "no posts");
  if (tree.parent.size() != tree.posts.size()) {
    throw MalformedEventError(id, "parent array does not match post count");
  }
  if (tree.parent[0] != -1 || tree.posts[0].parent_id) {
    throw MalformedEventError(id, "first post is not the root");
  }
  for (std::size_t i = 1; i < tree.parent.size(); ++i) {
    const int p = tree.parent[i];
    if (p < 0 || p >= static_cast<int>(i)) {
      throw MalformedEventError(id, "posts are not in root-first topological order");
    }
    if (!tree.posts[i].parent_id || *tree.posts[i].parent_id != tree.posts[p].id) {
      throw MalformedEventError(id, "parent id of '" + tree.posts[i].id + "' disagrees with structure");
    }
  }
  if (tree.features.size() != 0 && tree.features.rows() != static_cast<Index>(tree.posts.size())) {
    throw MalformedEventError(id, "feature rows do not match post count");
  }
}

}  // namespace kpg
