#pragma once

#include <span>
#include <vector>

#include "kpg/nn/tensor.hpp"

namespace kpg {

/// Minimal rooted-tree view consumed by the GCN models: node i's parent is
/// parent[i] (-1 for the root) and row i of `features` is its feature vector.
struct Graph {
  std::vector<int> parent;
  Tensor2 features;

  Index size() const { return static_cast<Index>(parent.size()); }
};

/// True iff `parent` encodes a single directed tree: exactly one root (-1),
/// every other entry in range, and every node reaches the root.
bool is_rooted_tree(std::span<const int> parent);

/// Index of the unique root, or -1 if there is not exactly one.
int find_root(std::span<const int> parent);

}  // namespace kpg
