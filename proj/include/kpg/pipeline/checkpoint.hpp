#pragma once

#include <filesystem>

#include "kpg/pipeline/config.hpp"
#include "kpg/pipeline/experiment.hpp"

namespace kpg {

struct Checkpoint {
  ExperimentConfig config;
  TrainedFold models;
};

/// Named tensors of every model, the vocabulary and the canonical config with
/// its hash, as one JSON document.
void save_checkpoint(const std::filesystem::path& path, const ExperimentConfig& config,
                     const TrainedFold& models);

/// Throws DataError when the file is unreadable, malformed, a tensor shape
/// disagrees with the config, or the stored hash does not match the config.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace kpg
