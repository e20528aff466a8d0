#include "kpg/graph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "kpg/errors.hpp"
#include "kpg/nn/tensor.hpp"

namespace kpg {

namespace {

std::string numbered(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
  return buf;
}

std::string signal_token(int cls, int i) { return "c" + std::to_string(cls) + numbered("_w", i); }

std::string sentence(int len, Rng& rng, auto&& draw) {
  std::string out;
  for (int k = 0; k < len; ++k) {
    if (k) out.push_back(' ');
    out += draw(rng);
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("synth: " + what); };
  if (classes < 2) fail("classes must be >= 2");
  if (events_per_class < 1) fail("events_per_class must be >= 1");
  if (!(noise_ratio >= 0.0 && noise_ratio <= 1.0)) fail("noise_ratio must lie in [0, 1]");
  if (!(adversarial_share >= 0.0 && adversarial_share <= 1.0)) {
    fail("adversarial_share must lie in [0, 1]");
  }
  if (!(reply_coherence >= 0.0 && reply_coherence <= 1.0)) {
    fail("reply_coherence must lie in [0, 1]");
  }
  if (!(root_fidelity >= 0.0 && root_fidelity <= 1.0)) fail("root_fidelity must lie in [0, 1]");
  if (!(median_size >= 1.0)) fail("median_size must be >= 1");
  if (!(size_sigma >= 0.0)) fail("size_sigma must be >= 0");
  if (max_size < 1) fail("max_size must be >= 1");
  if (signal_pool < 1 || noise_pool < 1 || topic_pool < 1) fail("token pools must be non-empty");
  if (min_tokens < 1 || max_tokens < min_tokens) fail("need 1 <= min_tokens <= max_tokens");
  if (!(mean_delay_min > 0.0)) fail("mean_delay_min must be > 0");
}

std::vector<PropagationTree> synth_dataset(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  std::lognormal_distribution<double> size_dist(std::log(cfg.median_size), cfg.size_sigma);
  std::uniform_int_distribution<int> len_dist(cfg.min_tokens, cfg.max_tokens);
  std::uniform_int_distribution<int> signal_pick(0, cfg.signal_pool - 1);
  std::uniform_int_distribution<int> noise_pick(0, cfg.noise_pool - 1);
  std::uniform_int_distribution<int> topic_pick(0, cfg.topic_pool - 1);
  std::uniform_int_distribution<int> other_class(1, cfg.classes - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> delay(1.0 / cfg.mean_delay_min);

  auto draw_signal = [&](int cls) {
    return [&, cls](Rng& r) { return signal_token(cls, signal_pick(r)); };
  };
  auto draw_noise = [&](Rng& r) { return numbered("noise", noise_pick(r)); };

  std::vector<PropagationTree> trees;
  const int total = cfg.classes * cfg.events_per_class;
  trees.reserve(static_cast<std::size_t>(total));
  for (int e = 0; e < total; ++e) {
    const int label = e % cfg.classes;
    const int n = std::clamp(static_cast<int>(std::lround(size_dist(rng))), 1, cfg.max_size);

    std::vector<Post> posts;
    posts.reserve(static_cast<std::size_t>(n));

    // Root: topic words plus one class word that is right with root_fidelity.
    const int root_class =
        unit(rng) < cfg.root_fidelity ? label : (label + other_class(rng)) % cfg.classes;
    Post root;
    root.id = "p0";
    root.raw_text = sentence(len_dist(rng), rng,
                             [&](Rng& r) { return numbered("topic", topic_pick(r)); });
    root.raw_text += " " + signal_token(root_class, signal_pick(rng));
    posts.push_back(std::move(root));
    // Class whose tokens each post carries; -1 for noise. Replies to the root
    // always draw a fresh kind.
    std::vector<int> voices{-1};

    for (int i = 1; i < n; ++i) {
      std::uniform_int_distribution<int> attach(0, i - 1);
      const int parent = attach(rng);
      Post p;
      p.id = "p" + std::to_string(i);
      p.parent_id = posts[static_cast<std::size_t>(parent)].id;
      p.time_offset_min = posts[static_cast<std::size_t>(parent)].time_offset_min + delay(rng);
      const int len = len_dist(rng);
      int voice = -1;
      if (parent > 0 && unit(rng) < cfg.reply_coherence) {
        voice = voices[static_cast<std::size_t>(parent)];
      } else if (unit(rng) >= cfg.noise_ratio) {
        voice = label;
      } else if (unit(rng) < cfg.adversarial_share) {
        voice = (label + other_class(rng)) % cfg.classes;
      }
      p.raw_text = voice < 0 ? sentence(len, rng, draw_noise) : sentence(len, rng, draw_signal(voice));
      voices.push_back(voice);
      posts.push_back(std::move(p));
    }
    char event_id[32];
    std::snprintf(event_id, sizeof(event_id), "e%05d", e);
    trees.push_back(make_tree(event_id, label, std::move(posts)));
  }
  return trees;
}

}  // namespace kpg
