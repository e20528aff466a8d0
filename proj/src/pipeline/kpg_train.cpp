#include "kpg/pipeline/kpg_train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "kpg/errors.hpp"
#include "kpg/graph/dataset.hpp"
#include "kpg/nn/adam.hpp"

namespace kpg {

KpgModels::KpgModels(Index features, Index vocab, const ExperimentConfig& config, Index classes)
    : ens(features, config.hidden, classes),
      crg(vocab, config.hidden, config.z_dim),
      use_crg(config.ablation != Ablation::kNoCrg) {}

void KpgModels::init(Rng& rng) {
  ens.init(rng);
  crg.init(rng);
}

int max_steps(std::span<const PropagationTree> trees, double tau, TauMode mode) {
  if (trees.empty()) throw InputError("max_steps: no events");
  std::vector<double> sizes;
  for (const auto& t : trees) sizes.push_back(static_cast<double>(t.size()));
  if (mode == TauMode::kAverage) {
    double mean = 0.0;
    for (double s : sizes) mean += s;
    mean /= static_cast<double>(sizes.size());
    return std::max(1, static_cast<int>(std::lround(mean)));
  }
  if (tau <= 0.0) return 0;
  std::sort(sizes.begin(), sizes.end());
  const std::size_t n = sizes.size();
  const double median = n % 2 ? sizes[n / 2] : 0.5 * (sizes[n / 2 - 1] + sizes[n / 2]);
  return std::max(1, static_cast<int>(std::lround(tau * median)));
}

Rng event_rng(std::uint64_t seed, const std::string& event_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : event_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Rng(derive_seed(seed, h));
}

std::vector<Episode> generate_key_graphs(const KpgModels& models,
                                         std::span<const PropagationTree> trees,
                                         const Vocabulary& vocab, const EpisodeOptions& options,
                                         std::uint64_t seed) {
  std::vector<Episode> out;
  out.reserve(trees.size());
  for (const auto& tree : trees) {
    Rng rng = event_rng(seed, tree.event_id);
    out.push_back(generate_key_graph(models.ens, models.generator(), vocab, tree, options, rng));
  }
  return out;
}

std::string parameter_hash(std::span<const BlockParams* const> blocks) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto* b : blocks) {
    for (const auto& p : b->all()) {
      mix(p.name.data(), p.name.size());
      mix(p.value.data(), sizeof(double) * static_cast<std::size_t>(p.value.size()));
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::vector<ResponsePair> tree_pairs(const PropagationTree& tree) {
  std::vector<ResponsePair> pairs;
  for (std::size_t i = 1; i < tree.size(); ++i) {
    pairs.push_back({tree.posts[static_cast<std::size_t>(tree.parent[i])].tokens,
                     tree.root().tokens, tree.posts[i].tokens});
  }
  return pairs;
}

double validation_accuracy(const KpgModels& models, const BiGcn& reward_model,
                           std::span<const PropagationTree> val, const Vocabulary& vocab,
                           const EpisodeOptions& options, std::uint64_t seed) {
  if (val.empty()) return 0.0;
  int correct = 0;
  const auto episodes = generate_key_graphs(models, val, vocab, options, seed);
  for (std::size_t i = 0; i < val.size(); ++i) {
    correct += reward_model.predict(episodes[i].key.graph) == val[i].label;
  }
  return static_cast<double>(correct) / static_cast<double>(val.size());
}

}  // namespace

KpgTrainResult train_kpg(KpgModels& models, const BiGcn& reward_model,
                         std::span<const PropagationTree> train,
                         std::span<const PropagationTree> val, const Vocabulary& vocab,
                         const ExperimentConfig& config, int steps, std::uint64_t seed) {
  KpgTrainResult result;
  const EpisodeOptions options = episode_options(config, steps);
  AdamOptions adam;
  adam.learning_rate = config.lr;
  adam.decay = config.decay;

  const std::vector<std::size_t> order = curriculum_order(train);
  const auto batch = static_cast<std::size_t>(config.batch);
  for (std::size_t start = 0; start < order.size(); start += batch) {
    std::vector<std::string> ids;
    for (std::size_t i = start; i < std::min(order.size(), start + batch); ++i) {
      ids.push_back(train[order[i]].event_id);
    }
    result.batches.push_back(std::move(ids));
  }

  auto ens_blocks = models.ens.blocks();
  auto crg_blocks = models.crg.blocks();
  const bool train_ens = !options.random_selection;
  const bool train_crg = models.use_crg;
  const Index z = models.crg.z_dim();

  Rng rng(derive_seed(seed, 0x6b7067));
  std::vector<Episode> latest(train.size());
  std::vector<BlockParams> best_ens;
  std::vector<BlockParams> best_crg;
  int stale = 0;
  result.best_val_accuracy = -1.0;

  // Generator warm-up on the observed replies, unit reward, one update per event.
  for (int pass = 0; train_crg && pass < config.crg_warmup_epochs; ++pass) {
    double total = 0.0;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const std::size_t i : order) {
      const auto pairs = tree_pairs(train[i]);
      if (pairs.empty()) continue;
      for (const auto& pair : pairs) {
        RowVector noise(z);
        for (Index k = 0; k < z; ++k) noise(k) = gauss(rng);
        total += models.crg.pair_loss_backward(pair, 1.0, noise, config.crg_decoder_weight).total;
      }
      adam_update(crg_blocks, adam);
    }
    result.warmup_loss.push_back(total);
  }

  for (int epoch = 0; epoch < config.kpg_max_epochs; ++epoch) {
    KpgEpochLog log;
    log.epoch = epoch;
    double reward_sum = 0.0;
    int crg_reward_count = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      // Selector phase, generator frozen.
      for (std::size_t i = start; i < end; ++i) {
        const auto& tree = train[order[i]];
        latest[order[i]] = train_episode(models.ens, reward_model, models.generator(), vocab,
                                         tree, options, rng);
        const Episode& ep = latest[order[i]];
        log.ens_loss += ep.loss;
        log.steps += static_cast<int>(ep.steps.size());
        log.generated += ep.generated;
        for (const auto& s : ep.steps) reward_sum += s.reward;
      }
      if (train_ens) {
        adam_update(ens_blocks, adam);
      } else {
        zero_grad(ens_blocks);
      }
      // Generator phase on the latest key graphs, selector frozen.
      if (!train_crg) continue;
      for (std::size_t i = start; i < end; ++i) {
        const auto& tree = train[order[i]];
        const Episode& ep = latest[order[i]];
        const double reward =
            options.unit_rewards
                ? 1.0
                : reward_crg(reward_model, models.crg, ep.key, ep.pool, vocab, tree.label,
                             config.max_decode_len);
        log.mean_crg_reward += reward;
        ++crg_reward_count;
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (const auto& pair : harvest_pairs(ep.key, ep.pool)) {
          RowVector noise(z);
          for (Index k = 0; k < z; ++k) noise(k) = gauss(rng);
          log.crg_loss +=
              models.crg.pair_loss_backward(pair, reward, noise, config.crg_decoder_weight).total;
        }
      }
      adam_update(crg_blocks, adam);
    }
    log.mean_step_reward = log.steps ? reward_sum / log.steps : 0.0;
    log.mean_crg_reward = crg_reward_count ? log.mean_crg_reward / crg_reward_count : 0.0;
    log.val_accuracy = validation_accuracy(models, reward_model, val, vocab, options, seed);
    result.epochs.push_back(log);

    if (log.val_accuracy > result.best_val_accuracy) {
      result.best_val_accuracy = log.val_accuracy;
      result.best_epoch = epoch;
      stale = 0;
      best_ens.clear();
      best_crg.clear();
      for (auto* b : ens_blocks) best_ens.push_back(*b);
      for (auto* b : crg_blocks) best_crg.push_back(*b);
    } else if (++stale >= config.kpg_patience) {
      break;
    }
  }
  if (!best_ens.empty()) {
    for (std::size_t i = 0; i < ens_blocks.size(); ++i) *ens_blocks[i] = best_ens[i];
    for (std::size_t i = 0; i < crg_blocks.size(); ++i) *crg_blocks[i] = best_crg[i];
  }
  if (result.best_val_accuracy < 0.0) result.best_val_accuracy = 0.0;
  return result;
}

}  // namespace kpg
