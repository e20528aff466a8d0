#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kpg/errors.hpp"
#include "kpg/graph/dataset.hpp"
#include "kpg/graph/ingest.hpp"
#include "kpg/graph/synth.hpp"
#include "kpg/pipeline/checkpoint.hpp"
#include "kpg/pipeline/config.hpp"
#include "kpg/pipeline/experiment.hpp"
#include "kpg/pipeline/report.hpp"

namespace kpg::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string data;
  std::string out;
};

ExperimentConfig load_config(const Common& c) {
  if (c.config.empty()) return parse_config_text("", c.overrides);
  return parse_config(c.config, c.overrides);
}

std::vector<PropagationTree> load_data(const std::string& path) {
  if (path.empty()) throw DataError("no dataset given (--data)");
  auto trees = ingest_jsonl(path);
  if (trees.empty()) throw DataError("dataset " + path + " holds no events");
  return trees;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_delta(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "∞") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !(v >= 0.0)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("delta '" + s + "' is not a non-negative number or 'inf'");
  }
}

std::string metrics_row(const Metrics& m, int classes) {
  std::string out = csv_number(m.accuracy);
  for (int c = 0; c < classes; ++c) {
    const auto i = static_cast<std::size_t>(c);
    out += "," + csv_number(i < m.f1_per_class.size() ? m.f1_per_class[i] : 0.0);
  }
  return out;
}

std::string f1_header(int classes) {
  std::string out;
  for (int c = 0; c < classes; ++c) out += ",f1_c" + std::to_string(c);
  return out;
}

void add_common(CLI::App* sub, Common& c, bool data, bool out) {
  sub->add_option("--config", c.config, "Flat key = value config file");
  sub->add_option("--set", c.overrides, "Override a config key (key=value), repeatable");
  if (data) sub->add_option("--data", c.data, "Events as JSON lines")->required();
  if (out) sub->add_option("--out", c.out, "Output directory")->required();
}

int cmd_synth(const Common& c, std::ostream& out) {
  const ExperimentConfig cfg = load_config(c);
  const auto trees = synth_dataset(cfg.synth, cfg.seed);
  fs::create_directories(c.out);
  write_jsonl(fs::path(c.out) / "dataset.jsonl", trees);
  std::size_t nodes = 0;
  for (const auto& t : trees) nodes += t.size();
  out << "wrote " << trees.size() << " events (" << nodes << " posts) to "
      << (fs::path(c.out) / "dataset.jsonl").string() << "\n";
  return 0;
}

int cmd_ingest_check(const Common& c, std::ostream& out) {
  const auto trees = load_data(c.data);
  std::map<int, int> per_label;
  std::vector<std::size_t> sizes;
  for (const auto& t : trees) {
    ++per_label[t.label];
    sizes.push_back(t.size());
  }
  std::sort(sizes.begin(), sizes.end());
  out << "events " << trees.size() << "\n";
  for (const auto& [label, n] : per_label) out << "label " << label << " " << n << "\n";
  out << "median size " << sizes[sizes.size() / 2] << ", max size " << sizes.back() << "\n";
  out << "dataset hash " << dataset_hash(trees) << "\n";
  return 0;
}

int cmd_train(const Common& c, int checkpoint_fold, std::ostream& out) {
  const ExperimentConfig cfg = load_config(c);
  const auto trees = load_data(c.data);
  if (checkpoint_fold < 0 || checkpoint_fold >= cfg.folds) {
    throw ConfigError("--checkpoint-fold must lie in [0, folds)");
  }
  TrainedFold kept;
  const ExperimentReport report = run_experiment(trees, cfg, checkpoint_fold, &kept);
  write_report(c.out, report);
  write_text(fs::path(c.out) / "config.txt", cfg.canonical());
  save_checkpoint(fs::path(c.out) / "checkpoint.json", cfg, kept);
  out << "accuracy " << csv_number(report.aggregate.accuracy) << " over "
      << report.aggregate.count << " events; results in " << c.out << "\n";
  return 0;
}

int cmd_generate(const std::string& checkpoint, const Common& c, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  const auto trees = load_data(c.data);
  const Labelled labelled = label_events(ck.models, trees, ck.config);
  std::string lines;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const Episode& ep = labelled.episodes[i];
    ordered_json j;
    j["event_id"] = trees[i].event_id;
    j["label"] = trees[i].label;
    j["prediction"] = labelled.predictions[i];
    ordered_json nodes = ordered_json::array();
    for (int k = 0; k < ep.key.size(); ++k) {
      const auto v = static_cast<std::size_t>(ep.key.nodes[static_cast<std::size_t>(k)]);
      ordered_json n;
      n["node"] = ep.key.nodes[static_cast<std::size_t>(k)];
      n["parent"] = ep.key.graph.parent[static_cast<std::size_t>(k)];
      n["generated"] = static_cast<bool>(ep.pool.generated[v]);
      n["text"] = ck.models.vocab.decode(ep.pool.tokens[v]);
      nodes.push_back(n);
    }
    j["key_graph"] = nodes;
    lines += j.dump() + "\n";
  }
  write_text(fs::path(c.out) / "key_graphs.jsonl", lines);
  out << "wrote " << trees.size() << " key graphs to " << c.out << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const Common& c, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  const auto trees = load_data(c.data);
  for (const auto& t : trees) {
    if (t.label >= ck.models.classes) {
      throw DataError("event " + t.event_id + " has label " + std::to_string(t.label) +
                      " outside the checkpoint's " + std::to_string(ck.models.classes) +
                      " classes");
    }
  }
  const Labelled labelled = label_events(ck.models, trees, ck.config);
  std::vector<int> labels;
  for (const auto& t : trees) labels.push_back(t.label);
  const Metrics m = evaluate_metrics(labelled.predictions, labels, ck.models.classes);
  ordered_json j = metrics_json(m);
  j = ordered_json{{"config_hash", ck.config.hash()},
                   {"dataset_hash", dataset_hash(trees)},
                   {"metrics", j}};
  const std::string text = j.dump(2) + "\n";
  if (!c.out.empty()) write_text(fs::path(c.out) / "eval.json", text);
  out << text;
  return 0;
}

int cmd_ablate(const Common& c, const std::string& variant, std::ostream& out) {
  const ExperimentConfig base = load_config(c);
  const auto trees = load_data(c.data);
  std::vector<std::string> variants;
  if (variant == "all") {
    variants = {"full", "no-ens", "no-crg", "no-reward"};
  } else {
    parse_ablation(variant);
    variants = {variant};
  }
  const int classes = class_count(trees);
  std::string csv = "config_hash,variant,accuracy" + f1_header(classes) + "\n";
  for (const auto& v : variants) {
    ExperimentConfig cfg = base;
    cfg.ablation = parse_ablation(v);
    const ExperimentReport report = run_experiment(trees, cfg);
    write_report(fs::path(c.out) / v, report);
    csv += report.config_hash + "," + v + "," + metrics_row(report.aggregate, classes) + "\n";
    out << v << " accuracy " << csv_number(report.aggregate.accuracy) << "\n";
  }
  write_text(fs::path(c.out) / "ablation.csv", csv);
  return 0;
}

int cmd_sweep(const Common& c, const std::string& param, const std::string& values,
              std::ostream& out) {
  static const std::vector<std::string> allowed{"epsilon", "tau", "rollout_l", "gamma"};
  if (std::find(allowed.begin(), allowed.end(), param) == allowed.end()) {
    throw ConfigError("--param must be one of epsilon, tau, rollout_l, gamma");
  }
  const ExperimentConfig base = load_config(c);
  const auto list = split_list(values);
  if (list.empty()) throw ConfigError("--values is empty");
  // Check every point before running any of them.
  std::vector<ExperimentConfig> points;
  for (const auto& v : list) {
    ExperimentConfig cfg = base;
    cfg.set(param, v);
    cfg.validate();
    points.push_back(cfg);
  }
  const auto trees = load_data(c.data);
  const int classes = class_count(trees);
  std::string csv = "base_config_hash,config_hash,param,value,accuracy" + f1_header(classes) +
                    ",steps\n";
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ExperimentReport report = run_experiment(trees, points[i]);
    write_report(fs::path(c.out) / (param + "=" + list[i]), report);
    csv += base.hash() + "," + report.config_hash + "," + param + "," + list[i] + "," +
           metrics_row(report.aggregate, classes) + "," + std::to_string(report.steps) + "\n";
    ordered_json row = metrics_json(report.aggregate);
    row["value"] = list[i];
    row["config_hash"] = report.config_hash;
    rows.push_back(row);
    out << param << "=" << list[i] << " accuracy " << csv_number(report.aggregate.accuracy)
        << "\n";
  }
  write_text(fs::path(c.out) / "sweep.csv", csv);
  write_text(fs::path(c.out) / "sweep.json",
             ordered_json{{"base_config_hash", base.hash()}, {"param", param}, {"rows", rows}}
                     .dump(2) +
                 "\n");
  return 0;
}

int cmd_early_stage(const Common& c, const std::string& deltas_text, std::ostream& out) {
  const ExperimentConfig cfg = load_config(c);
  std::vector<double> deltas = cfg.deltas;
  std::vector<std::string> labels;
  if (!deltas_text.empty()) {
    deltas.clear();
    for (const auto& s : split_list(deltas_text)) deltas.push_back(parse_delta(s));
  }
  if (deltas.empty()) throw ConfigError("no deltas given");
  const auto trees = load_data(c.data);
  const int classes = class_count(trees);
  std::string csv = "config_hash,delta_min,accuracy" + f1_header(classes) + ",mean_nodes\n";
  for (double delta : deltas) {
    std::vector<PropagationTree> filtered;
    double nodes = 0.0;
    for (const auto& t : trees) {
      filtered.push_back(std::isinf(delta) ? t : early_stage_filter(t, delta));
      nodes += static_cast<double>(filtered.back().size());
    }
    const ExperimentReport report = run_experiment(filtered, cfg);
    const std::string tag = std::isinf(delta) ? "inf" : csv_number(delta);
    write_report(fs::path(c.out) / ("delta=" + tag), report);
    csv += report.config_hash + "," + tag + "," + metrics_row(report.aggregate, classes) + "," +
           csv_number(nodes / static_cast<double>(trees.size())) + "\n";
    out << "delta " << tag << " accuracy " << csv_number(report.aggregate.accuracy) << "\n";
  }
  write_text(fs::path(c.out) / "early_stage.csv", csv);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Key propagation graph generation for rumor detection"};
  app.require_subcommand(1);
  Common common;
  std::string checkpoint;
  std::string variant = "full";
  std::string param;
  std::string values;
  std::string deltas;
  int checkpoint_fold = 0;

  auto* synth = app.add_subcommand("synth", "Write a planted-signal synthetic dataset");
  add_common(synth, common, false, true);
  auto* ingest = app.add_subcommand("ingest-check", "Validate a JSON-lines dataset");
  ingest->add_option("--data", common.data, "Events as JSON lines")->required();
  auto* train = app.add_subcommand("train", "Cross-validate and save fold models");
  add_common(train, common, true, true);
  train->add_option("--checkpoint-fold", checkpoint_fold, "Fold whose models are saved");
  auto* generate = app.add_subcommand("generate", "Write key graphs for a dataset");
  generate->add_option("--checkpoint", checkpoint, "checkpoint.json from train")->required();
  generate->add_option("--data", common.data, "Events as JSON lines")->required();
  generate->add_option("--out", common.out, "Output directory")->required();
  auto* eval = app.add_subcommand("eval", "Score a dataset with a checkpoint");
  eval->add_option("--checkpoint", checkpoint, "checkpoint.json from train")->required();
  eval->add_option("--data", common.data, "Events as JSON lines")->required();
  eval->add_option("--out", common.out, "Optional output directory");
  auto* ablate = app.add_subcommand("ablate", "Run an ablation variant");
  add_common(ablate, common, true, true);
  ablate->add_option("--variant", variant, "full, no-ens, no-crg, no-reward or all")
      ->check(CLI::IsMember({"full", "no-ens", "no-crg", "no-reward", "all"}));
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter");
  add_common(sweep, common, true, true);
  sweep->add_option("--param", param, "epsilon, tau, rollout_l or gamma")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  auto* early = app.add_subcommand("early-stage", "Evaluate on time-truncated trees");
  add_common(early, common, true, true);
  early->add_option("--deltas", deltas, "Comma-separated minutes; 'inf' keeps every post");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(common, out);
    if (ingest->parsed()) return cmd_ingest_check(common, out);
    if (train->parsed()) return cmd_train(common, checkpoint_fold, out);
    if (generate->parsed()) return cmd_generate(checkpoint, common, out);
    if (eval->parsed()) return cmd_eval(checkpoint, common, out);
    if (ablate->parsed()) return cmd_ablate(common, variant, out);
    if (sweep->parsed()) return cmd_sweep(common, param, values, out);
    if (early->parsed()) return cmd_early_stage(common, deltas, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace kpg::cli
