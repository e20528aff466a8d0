#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "kpg/ens/ens_model.hpp"
#include "kpg/graph/synth.hpp"

namespace kpg {

enum class Ablation { kNone, kNoEns, kNoCrg, kNoReward };
enum class TauMode { kMedian, kAverage };

/// Every tunable of an experiment. Defaults follow the published parameter
/// settings (epsilon 0.8, gamma 5, rollout 10, hidden 64, batch 128,
/// lr 5e-4, decay 1e-4, 5 folds, tau 8).
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int d = 1000;  // vocabulary cap, i.e. feature width
  int hidden = 64;
  int batch = 128;
  double lr = 5e-4;
  double decay = 1e-4;
  double epsilon = 0.8;
  int gamma = 5;
  int rollout_l = 10;
  double tau = 8.0;
  TauMode tau_mode = TauMode::kMedian;
  std::vector<double> deltas{20.0, 60.0, 120.0, 240.0};
  int folds = 5;
  int patience = 10;
  int max_epochs = 200;
  int kpg_max_epochs = 10;
  int kpg_patience = 3;
  double val_fraction = 0.1;
  int z_dim = 16;
  int max_decode_len = 12;
  double crg_decoder_weight = 1.0;
  /// Passes over the real reply pairs of the training trees before the
  /// alternating phase; zero starts the generator from its random init.
  int crg_warmup_epochs = 2;
  Ablation ablation = Ablation::kNone;
  bool force_unit_rewards = false;
  EnsLossVariant ens_loss = EnsLossVariant::kHeadCrossEntropy;
  double ens_ce_weight = 1.0;
  double ens_pg_weight = 1.0;
  bool fuse_text = false;
  bool report_baselines = true;
  bool timing = false;
  int threads = 1;
  SynthConfig synth;

  /// Throws ConfigError naming the first out-of-domain value.
  void validate() const;

  /// Sets one key from its textual value. Throws ConfigError for unknown
  /// keys (listing the valid ones) and unparsable or out-of-domain values.
  void set(const std::string& key, const std::string& value);

  /// Canonical "key = value" lines, sorted by key.
  std::string canonical() const;

  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;

  static std::vector<std::string> keys();
};

/// Reads a flat key/value document ("key = value", '#' comments, blank lines
/// ignored) and applies `overrides` ("key=value") on top. Throws ConfigError.
ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});

std::string to_string(Ablation a);
Ablation parse_ablation(const std::string& s);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace kpg
