#include "kpg/pipeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "kpg/errors.hpp"

namespace kpg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field int_field(T ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*m = static_cast<T>(parse_int(k, v));
          },
          [m](const ExperimentConfig& c) { return std::to_string(c.*m); }};
}

Field double_field(double ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*m = parse_double(k, v);
          },
          [m](const ExperimentConfig& c) { return fmt(c.*m); }};
}

Field bool_field(bool ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*m = parse_bool(k, v);
          },
          [m](const ExperimentConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

template <typename T>
Field synth_int(T SynthConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.synth.*m = static_cast<T>(parse_int(k, v));
          },
          [m](const ExperimentConfig& c) { return std::to_string(c.synth.*m); }};
}

Field synth_double(double SynthConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.synth.*m = parse_double(k, v);
          },
          [m](const ExperimentConfig& c) { return fmt(c.synth.*m); }};
}

const std::map<std::string, Field>& registry() {
  static const std::map<std::string, Field> fields = [] {
    std::map<std::string, Field> f;
    f["seed"] = {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                   const long long s = parse_int(k, v);
                   if (s < 0) throw ConfigError("config key 'seed' must be >= 0");
                   c.seed = static_cast<std::uint64_t>(s);
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }};
    f["d"] = int_field(&ExperimentConfig::d);
    f["hidden"] = int_field(&ExperimentConfig::hidden);
    f["batch"] = int_field(&ExperimentConfig::batch);
    f["lr"] = double_field(&ExperimentConfig::lr);
    f["decay"] = double_field(&ExperimentConfig::decay);
    f["epsilon"] = double_field(&ExperimentConfig::epsilon);
    f["gamma"] = int_field(&ExperimentConfig::gamma);
    f["rollout_l"] = int_field(&ExperimentConfig::rollout_l);
    f["tau"] = {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                  if (trim(v) == "avg") {
                    c.tau_mode = TauMode::kAverage;
                    c.tau = 1.0;
                  } else {
                    c.tau_mode = TauMode::kMedian;
                    c.tau = parse_double(k, v);
                  }
                },
                [](const ExperimentConfig& c) {
                  return c.tau_mode == TauMode::kAverage ? std::string("avg") : fmt(c.tau);
                }};
    f["deltas"] = {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                     c.deltas.clear();
                     std::stringstream ss(v);
                     std::string item;
                     while (std::getline(ss, item, ',')) {
                       if (!trim(item).empty()) c.deltas.push_back(parse_double(k, item));
                     }
                   },
                   [](const ExperimentConfig& c) {
                     std::string out;
                     for (std::size_t i = 0; i < c.deltas.size(); ++i) {
                       if (i) out += ",";
                       out += fmt(c.deltas[i]);
                     }
                     return out;
                   }};
    f["folds"] = int_field(&ExperimentConfig::folds);
    f["patience"] = int_field(&ExperimentConfig::patience);
    f["max_epochs"] = int_field(&ExperimentConfig::max_epochs);
    f["kpg_max_epochs"] = int_field(&ExperimentConfig::kpg_max_epochs);
    f["kpg_patience"] = int_field(&ExperimentConfig::kpg_patience);
    f["val_fraction"] = double_field(&ExperimentConfig::val_fraction);
    f["z_dim"] = int_field(&ExperimentConfig::z_dim);
    f["max_decode_len"] = int_field(&ExperimentConfig::max_decode_len);
    f["crg_decoder_weight"] = double_field(&ExperimentConfig::crg_decoder_weight);
    f["crg_warmup_epochs"] = int_field(&ExperimentConfig::crg_warmup_epochs);
    f["ablation"] = {[](ExperimentConfig& c, const std::string&, const std::string& v) {
                       c.ablation = parse_ablation(trim(v));
                     },
                     [](const ExperimentConfig& c) { return to_string(c.ablation); }};
    f["force_unit_rewards"] = bool_field(&ExperimentConfig::force_unit_rewards);
    f["ens_loss"] = {[](ExperimentConfig& c, const std::string&, const std::string& v) {
                       const std::string t = trim(v);
                       if (t == "head-ce") {
                         c.ens_loss = EnsLossVariant::kHeadCrossEntropy;
                       } else if (t == "action-nll") {
                         c.ens_loss = EnsLossVariant::kActionLikelihood;
                       } else {
                         throw ConfigError("config key 'ens_loss': expected head-ce or action-nll");
                       }
                     },
                     [](const ExperimentConfig& c) {
                       return std::string(c.ens_loss == EnsLossVariant::kHeadCrossEntropy
                                              ? "head-ce"
                                              : "action-nll");
                     }};
    f["ens_ce_weight"] = double_field(&ExperimentConfig::ens_ce_weight);
    f["ens_pg_weight"] = double_field(&ExperimentConfig::ens_pg_weight);
    f["fuse_text"] = bool_field(&ExperimentConfig::fuse_text);
    f["report_baselines"] = bool_field(&ExperimentConfig::report_baselines);
    f["timing"] = bool_field(&ExperimentConfig::timing);
    f["threads"] = int_field(&ExperimentConfig::threads);
    f["synth.classes"] = synth_int(&SynthConfig::classes);
    f["synth.events_per_class"] = synth_int(&SynthConfig::events_per_class);
    f["synth.noise_ratio"] = synth_double(&SynthConfig::noise_ratio);
    f["synth.adversarial_share"] = synth_double(&SynthConfig::adversarial_share);
    f["synth.reply_coherence"] = synth_double(&SynthConfig::reply_coherence);
    f["synth.median_size"] = synth_double(&SynthConfig::median_size);
    f["synth.size_sigma"] = synth_double(&SynthConfig::size_sigma);
    f["synth.max_size"] = synth_int(&SynthConfig::max_size);
    f["synth.signal_pool"] = synth_int(&SynthConfig::signal_pool);
    f["synth.noise_pool"] = synth_int(&SynthConfig::noise_pool);
    f["synth.topic_pool"] = synth_int(&SynthConfig::topic_pool);
    f["synth.min_tokens"] = synth_int(&SynthConfig::min_tokens);
    f["synth.max_tokens"] = synth_int(&SynthConfig::max_tokens);
    f["synth.root_fidelity"] = synth_double(&SynthConfig::root_fidelity);
    f["synth.mean_delay_min"] = synth_double(&SynthConfig::mean_delay_min);
    return f;
  }();
  return fields;
}

}  // namespace

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::kNone: return "full";
    case Ablation::kNoEns: return "no-ens";
    case Ablation::kNoCrg: return "no-crg";
    case Ablation::kNoReward: return "no-reward";
  }
  return "full";
}

Ablation parse_ablation(const std::string& s) {
  if (s == "full" || s == "none") return Ablation::kNone;
  if (s == "no-ens") return Ablation::kNoEns;
  if (s == "no-crg") return Ablation::kNoCrg;
  if (s == "no-reward") return Ablation::kNoReward;
  throw ConfigError("unknown ablation '" + s + "' (expected full, no-ens, no-crg or no-reward)");
}

std::vector<std::string> ExperimentConfig::keys() {
  std::vector<std::string> out;
  for (const auto& [k, f] : registry()) out.push_back(k);
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const auto& reg = registry();
  auto it = reg.find(key);
  if (it == reg.end()) {
    std::string valid;
    for (const auto& [k, f] : reg) valid += (valid.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config key '" + key + "'; valid keys: " + valid);
  }
  it->second.set(*this, key, value);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
  if (d < 1) fail("d must be >= 1");
  if (hidden < 1) fail("hidden must be >= 1");
  if (batch < 1) fail("batch must be >= 1");
  if (!(lr > 0.0)) fail("lr must be > 0");
  if (!(decay >= 0.0)) fail("decay must be >= 0");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) fail("epsilon must lie in [0, 1]");
  if (gamma < 0) fail("gamma must be >= 0");
  if (rollout_l < 0) fail("rollout_l must be >= 0");
  if (!(tau >= 0.0) || std::isinf(tau)) fail("tau must be a finite value >= 0 or 'avg'");
  for (double x : deltas) {
    if (!(x >= 0.0)) fail("deltas must be >= 0");
  }
  if (folds < 2) fail("folds must be >= 2");
  if (patience < 1) fail("patience must be >= 1");
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (kpg_max_epochs < 0) fail("kpg_max_epochs must be >= 0");
  if (kpg_patience < 1) fail("kpg_patience must be >= 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) fail("val_fraction must lie in (0, 1)");
  if (z_dim < 1) fail("z_dim must be >= 1");
  if (max_decode_len < 1) fail("max_decode_len must be >= 1");
  if (!(crg_decoder_weight >= 0.0)) fail("crg_decoder_weight must be >= 0");
  if (crg_warmup_epochs < 0) fail("crg_warmup_epochs must be >= 0");
  if (!(ens_ce_weight >= 0.0) || !(ens_pg_weight >= 0.0)) fail("ens loss weights must be >= 0");
  if (threads < 1) fail("threads must be >= 1");
  synth.validate();
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& [k, f] : registry()) out += k + " = " + f.get(*this) + "\n";
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical()); }

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected key=value");
    cfg.set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

}  // namespace kpg
