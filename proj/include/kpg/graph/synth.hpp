#pragma once

#include <cstdint>
#include <vector>

#include "kpg/graph/tree.hpp"

namespace kpg {

/// Planted-signal cascade generator. Each class owns a pool of signal tokens;
/// a shared noise pool carries no class information and a topic pool fills
/// root posts.
struct SynthConfig {
  int classes = 2;
  int events_per_class = 300;
  /// Probability that a response is not class signal.
  double noise_ratio = 0.6;
  /// Among non-signal responses, fraction written with another class's tokens.
  double adversarial_share = 0.25;
  /// Probability that a reply to a non-root post carries the same class tokens
  /// as its parent (or noise under a noise parent) instead of drawing a fresh kind.
  double reply_coherence = 0.8;
  double median_size = 13.0;
  /// Log-normal shape of the tree size distribution.
  double size_sigma = 0.8;
  int max_size = 120;
  int signal_pool = 30;
  int noise_pool = 60;
  int topic_pool = 40;
  int min_tokens = 3;
  int max_tokens = 7;
  /// Probability that the single class token in the root names the true class.
  double root_fidelity = 0.7;
  /// Mean reply delay in minutes; offsets accumulate along root-to-leaf paths.
  double mean_delay_min = 30.0;

  /// Throws ConfigError on out-of-domain values.
  void validate() const;
};

std::vector<PropagationTree> synth_dataset(const SynthConfig& config, std::uint64_t seed);

}  // namespace kpg
