#include "kpg/pipeline/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <random>

#include "kpg/classifier/train.hpp"
#include "kpg/errors.hpp"
#include "kpg/graph/ingest.hpp"
#include "kpg/nn/functional.hpp"

namespace kpg {

int class_count(std::span<const PropagationTree> trees) {
  int c = 2;
  for (const auto& t : trees) c = std::max(c, t.label + 1);
  return c;
}

std::string dataset_hash(std::span<const PropagationTree> trees) {
  std::string all;
  for (const auto& t : trees) {
    all += serialize_event(t);
    all += '\n';
  }
  return fnv1a_hex(all);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(
    std::span<const PropagationTree> trees, double val_fraction, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < trees.size(); ++i) by_label[trees[i].label].push_back(i);
  Rng rng(seed);
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  for (auto& [label, idx] : by_label) {
    std::shuffle(idx.begin(), idx.end(), rng);
    auto take = static_cast<std::size_t>(std::lround(val_fraction * static_cast<double>(idx.size())));
    if (idx.size() >= 2) take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
    else take = 0;
    val.insert(val.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
    train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {train, val};
}

namespace {

std::vector<PropagationTree> featurized(std::span<const PropagationTree> trees,
                                        const Vocabulary& vocab) {
  std::vector<PropagationTree> out(trees.begin(), trees.end());
  for (auto& t : out) featurize(t, vocab);
  return out;
}

std::vector<PropagationTree> pick(std::span<const PropagationTree> trees,
                                  std::span<const std::size_t> idx) {
  std::vector<PropagationTree> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(trees[i]);
  return out;
}

std::vector<Graph> full_graphs(std::span<const PropagationTree> trees) {
  std::vector<Graph> g;
  for (const auto& t : trees) g.push_back(t.graph());
  return g;
}

std::vector<Graph> root_graphs(std::span<const PropagationTree> trees) {
  std::vector<Graph> g;
  for (const auto& t : trees) g.push_back(root_only_graph(t));
  return g;
}

std::vector<Graph> key_graphs(std::span<const Episode> episodes) {
  std::vector<Graph> g;
  for (const auto& e : episodes) g.push_back(e.key.graph);
  return g;
}

std::vector<int> labels_of(std::span<const PropagationTree> trees) {
  std::vector<int> y;
  for (const auto& t : trees) y.push_back(t.label);
  return y;
}

ClassifierTrainOptions classifier_options(const ExperimentConfig& c, std::uint64_t seed) {
  ClassifierTrainOptions o;
  o.adam.learning_rate = c.lr;
  o.adam.decay = c.decay;
  o.batch = c.batch;
  o.max_epochs = c.max_epochs;
  o.patience = c.patience;
  o.seed = seed;
  return o;
}

BiGcn fit_bigcn(std::span<const Graph> graphs, std::span<const int> labels,
                std::span<const Graph> val_graphs, std::span<const int> val_labels, Index width,
                int classes, const ExperimentConfig& c, std::uint64_t seed) {
  BiGcn model(width, c.hidden, classes);
  Rng rng(derive_seed(seed, 1));
  model.init(rng);
  train_classifier(model, graphs, labels, val_graphs, val_labels,
                   classifier_options(c, derive_seed(seed, 2)));
  return model;
}

std::vector<int> predict_with_text(const BiGcn& model, std::span<const Graph> graphs,
                                   const TextHead* text, std::span<const RowVector> bags) {
  std::vector<int> out;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    RowVector p = model.forward(graphs[i]);
    if (text != nullptr) p = fuse_predictions(p, text->forward(bags[i]));
    out.push_back(argmax(p));
  }
  return out;
}

std::vector<RowVector> bags_of(std::span<const PropagationTree> trees, const Vocabulary& vocab) {
  std::vector<RowVector> out;
  for (const auto& t : trees) out.push_back(event_bag(t, vocab));
  return out;
}

}  // namespace

FoldReport run_fold(std::span<const PropagationTree> train_raw,
                    std::span<const PropagationTree> test_raw, const ExperimentConfig& config,
                    int fold, std::uint64_t seed, TrainedFold* keep, int classes) {
  const auto t0 = std::chrono::steady_clock::now();
  if (train_raw.empty() || test_raw.empty()) throw InputError("run_fold: empty train or test set");
  if (classes <= 0) classes = std::max(class_count(train_raw), class_count(test_raw));

  FoldReport report;
  report.fold = fold;

  const Vocabulary vocab = build_vocab(train_raw, static_cast<std::size_t>(config.d));
  const auto width = static_cast<Index>(vocab.size());
  const std::vector<PropagationTree> train_all = featurized(train_raw, vocab);
  const std::vector<PropagationTree> test = featurized(test_raw, vocab);
  const auto [core_idx, val_idx] =
      stratified_holdout(train_all, config.val_fraction, derive_seed(seed, 11));
  const std::vector<PropagationTree> core = pick(train_all, core_idx);
  const std::vector<PropagationTree> val = pick(train_all, val_idx);
  const std::vector<int> core_y = labels_of(core);
  const std::vector<int> val_y = labels_of(val);
  const std::vector<int> test_y = labels_of(test);

  // Frozen reward classifier over complete trees.
  const std::vector<Graph> core_full = full_graphs(core);
  const std::vector<Graph> val_full = full_graphs(val);
  const std::vector<Graph> test_full = full_graphs(test);
  BiGcn reward_model =
      fit_bigcn(core_full, core_y, val_full, val_y, width, classes, config, derive_seed(seed, 21));

  if (config.report_baselines) {
    auto& full = report.baseline_predictions["bigcn_full"];
    full = predict_all(reward_model, test_full);
    report.baselines["bigcn_full"] = evaluate_metrics(full, test_y, classes);
    const auto core_root = root_graphs(core);
    const auto val_root = root_graphs(val);
    const auto test_root = root_graphs(test);
    const BiGcn root_model = fit_bigcn(core_root, core_y, val_root, val_y, width, classes, config,
                                       derive_seed(seed, 22));
    auto& root = report.baseline_predictions["root_only"];
    root = predict_all(root_model, test_root);
    report.baselines["root_only"] = evaluate_metrics(root, test_y, classes);
  }

  const int steps = max_steps(train_all, config.tau, config.tau_mode);
  report.max_steps = steps;
  KpgModels kpg(width, width, config, classes);
  {
    Rng rng(derive_seed(seed, 31));
    kpg.init(rng);
  }
  const std::string frozen = parameter_hash(reward_model.blocks());
  if (steps > 0 && config.kpg_max_epochs > 0) {
    const KpgTrainResult trained =
        train_kpg(kpg, reward_model, core, val, vocab, config, steps, derive_seed(seed, 32));
    report.kpg_epochs = static_cast<int>(trained.epochs.size());
  }
  if (parameter_hash(reward_model.blocks()) != frozen) {
    throw std::logic_error("reward classifier changed during key-graph training");
  }

  const EpisodeOptions options = episode_options(config, steps);
  const std::uint64_t gen_seed = derive_seed(seed, 41);
  const auto core_eps = generate_key_graphs(kpg, core, vocab, options, gen_seed);
  const auto val_eps = generate_key_graphs(kpg, val, vocab, options, gen_seed);
  const auto test_eps = generate_key_graphs(kpg, test, vocab, options, gen_seed);
  const auto core_key = key_graphs(core_eps);
  const auto val_key = key_graphs(val_eps);
  const auto test_key = key_graphs(test_eps);

  BiGcn downstream =
      fit_bigcn(core_key, core_y, val_key, val_y, width, classes, config, derive_seed(seed, 51));

  TextHead text;
  std::vector<RowVector> test_bags;
  if (config.fuse_text) {
    text = TextHead(width, classes);
    Rng rng(derive_seed(seed, 61));
    text.init(rng);
    const auto core_bags = bags_of(core, vocab);
    const auto val_bags = bags_of(val, vocab);
    train_text_head(text, core_bags, core_y, val_bags, val_y,
                    classifier_options(config, derive_seed(seed, 62)));
    test_bags = bags_of(test, vocab);
  }

  report.predictions =
      predict_with_text(downstream, test_key, config.fuse_text ? &text : nullptr, test_bags);
  report.labels = test_y;
  for (const auto& t : test) report.event_ids.push_back(t.event_id);
  report.kpg = evaluate_metrics(report.predictions, test_y, classes);
  double size_sum = 0.0;
  for (const auto& e : test_eps) {
    report.steps += static_cast<long long>(e.steps.size());
    size_sum += e.key.size();
  }
  report.mean_key_graph_size = size_sum / static_cast<double>(test_eps.size());

  if (keep != nullptr) {
    keep->vocab = vocab;
    keep->classes = classes;
    keep->steps = steps;
    keep->reward_model = reward_model;
    keep->kpg = kpg;
    keep->downstream = downstream;
    keep->has_text = config.fuse_text;
    keep->text = text;
  }
  if (config.timing) {
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return report;
}

ExperimentReport run_experiment(std::span<const PropagationTree> trees,
                                const ExperimentConfig& config, std::optional<int> keep_fold,
                                TrainedFold* kept) {
  config.validate();
  if (trees.empty()) throw InputError("run_experiment: no events");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config_hash = config.hash();
  report.dataset_hash = dataset_hash(trees);
  report.classes = class_count(trees);
  const DatasetSplit split = split_folds(trees, config.folds, config.seed);

  auto one = [&](int k) {
    std::vector<PropagationTree> train;
    std::vector<PropagationTree> test;
    for (const auto& t : trees) (split.fold(t.event_id) == k ? test : train).push_back(t);
    TrainedFold* keep = keep_fold && *keep_fold == k ? kept : nullptr;
    return run_fold(train, test, config, k, derive_seed(config.seed, 1000 + k), keep,
                    report.classes);
  };

  report.folds.resize(static_cast<std::size_t>(config.folds));
  for (int start = 0; start < config.folds; start += config.threads) {
    const int end = std::min(config.folds, start + config.threads);
    if (end - start == 1) {
      report.folds[start] = one(start);
      continue;
    }
    std::vector<std::future<FoldReport>> running;
    for (int k = start; k < end; ++k) running.push_back(std::async(std::launch::async, one, k));
    for (int k = start; k < end; ++k) report.folds[k] = running[k - start].get();
  }

  std::vector<int> preds;
  std::vector<int> labels;
  for (const auto& f : report.folds) {
    preds.insert(preds.end(), f.predictions.begin(), f.predictions.end());
    labels.insert(labels.end(), f.labels.begin(), f.labels.end());
    report.steps += f.steps;
  }
  report.aggregate = evaluate_metrics(preds, labels, report.classes);
  if (config.report_baselines) {
    for (const auto& name : {std::string("bigcn_full"), std::string("root_only")}) {
      std::vector<int> pooled;
      for (const auto& f : report.folds) {
        const auto& p = f.baseline_predictions.at(name);
        pooled.insert(pooled.end(), p.begin(), p.end());
      }
      report.aggregate_baselines[name] = evaluate_metrics(pooled, labels, report.classes);
    }
  }
  if (config.timing) {
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return report;
}

Labelled label_events(const TrainedFold& fold, std::span<const PropagationTree> trees,
                      const ExperimentConfig& config) {
  const std::vector<PropagationTree> feats = featurized(trees, fold.vocab);
  Labelled out;
  out.episodes = generate_key_graphs(fold.kpg, feats, fold.vocab,
                                     episode_options(config, fold.steps),
                                     derive_seed(config.seed, 41));
  const auto graphs = key_graphs(out.episodes);
  std::vector<RowVector> bags;
  if (fold.has_text) bags = bags_of(feats, fold.vocab);
  out.predictions =
      predict_with_text(fold.downstream, graphs, fold.has_text ? &fold.text : nullptr, bags);
  return out;
}

}  // namespace kpg
