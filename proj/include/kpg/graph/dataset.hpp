#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kpg/graph/tree.hpp"

namespace kpg {

/// Keeps the root plus every post with time_offset_min <= delta_min whose
/// whole ancestor chain is kept. Features, when present, follow the posts.
PropagationTree early_stage_filter(const PropagationTree& tree, double delta_min);

/// Stratified fold assignment.
struct DatasetSplit {
  int folds = 5;
  std::unordered_map<std::string, int> fold_of;
  std::vector<std::string> warnings;

  int fold(const std::string& event_id) const { return fold_of.at(event_id); }
};

/// Seeded shuffle within each label, then round-robin across folds with the
/// starting fold carried over between labels. Per-class counts per fold stay
/// within one of each other. Throws InputError when folds < 2.
DatasetSplit split_folds(std::span<const PropagationTree> trees, int folds, std::uint64_t seed);

/// Indices of `trees` sorted by size descending, then event_id ascending.
std::vector<std::size_t> curriculum_order(std::span<const PropagationTree> trees);

}  // namespace kpg
