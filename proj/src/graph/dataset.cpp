#include "kpg/graph/dataset.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "kpg/errors.hpp"
#include "kpg/nn/tensor.hpp"

namespace kpg {

PropagationTree early_stage_filter(const PropagationTree& tree, double delta_min) {
  if (delta_min < 0.0) throw InputError("early_stage_filter: delta must be >= 0");
  // Posts are root-first, so a parent's decision is always known first.
  std::vector<int> new_index(tree.size(), -1);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const int p = tree.parent[i];
    const bool keep = p < 0 || (new_index[static_cast<std::size_t>(p)] >= 0 &&
                                tree.posts[i].time_offset_min <= delta_min);
    if (keep) {
      new_index[i] = static_cast<int>(kept.size());
      kept.push_back(i);
    }
  }

  PropagationTree out;
  out.event_id = tree.event_id;
  out.label = tree.label;
  out.posts.reserve(kept.size());
  out.parent.reserve(kept.size());
  for (std::size_t i : kept) {
    out.posts.push_back(tree.posts[i]);
    const int p = tree.parent[i];
    out.parent.push_back(p < 0 ? -1 : new_index[static_cast<std::size_t>(p)]);
  }
  if (tree.features.size() != 0) {
    out.features.resize(static_cast<Index>(kept.size()), tree.features.cols());
    for (std::size_t k = 0; k < kept.size(); ++k) {
      out.features.row(static_cast<Index>(k)) = tree.features.row(static_cast<Index>(kept[k]));
    }
  }
  return out;
}

DatasetSplit split_folds(std::span<const PropagationTree> trees, int folds, std::uint64_t seed) {
  if (folds < 2) throw InputError("split_folds: need at least 2 folds");
  DatasetSplit split;
  split.folds = folds;

  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < trees.size(); ++i) by_label[trees[i].label].push_back(i);

  Rng rng(seed);
  int next_fold = 0;
  for (auto& [label, members] : by_label) {
    if (static_cast<int>(members.size()) < folds) {
      split.warnings.push_back("label " + std::to_string(label) + " has " +
                               std::to_string(members.size()) + " events for " +
                               std::to_string(folds) + " folds");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < members.size(); ++k) {
      split.fold_of[trees[members[k]].event_id] =
          static_cast<int>((next_fold + static_cast<int>(k)) % folds);
    }
    next_fold = static_cast<int>((next_fold + members.size()) % static_cast<std::size_t>(folds));
  }
  return split;
}

std::vector<std::size_t> curriculum_order(std::span<const PropagationTree> trees) {
  std::vector<std::size_t> order(trees.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (trees[a].size() != trees[b].size()) return trees[a].size() > trees[b].size();
    return trees[a].event_id < trees[b].event_id;
  });
  return order;
}

}  // namespace kpg
