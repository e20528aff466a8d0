#include "kpg/graph/graph.hpp"

namespace kpg {

int find_root(std::span<const int> parent) {
  int root = -1;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i] == -1) {
      if (root != -1) return -1;
      root = static_cast<int>(i);
    }
  }
  return root;
}

bool is_rooted_tree(std::span<const int> parent) {
  const int n = static_cast<int>(parent.size());
  if (n == 0 || find_root(parent) < 0) return false;
  // 0 = unvisited, 1 = on the current walk, 2 = known to reach the root.
  std::vector<char> state(parent.size(), 0);
  std::vector<int> walk;
  for (int start = 0; start < n; ++start) {
    walk.clear();
    int v = start;
    while (v != -1 && state[v] == 0) {
      if (parent[v] < -1 || parent[v] >= n) return false;
      state[v] = 1;
      walk.push_back(v);
      v = parent[v];
    }
    if (v != -1 && state[v] == 1) return false;  // cycle
    for (int w : walk) state[w] = 2;
  }
  return true;
}

}  // namespace kpg
