#include "kpg/pipeline/report.hpp"

#include <cstdio>
#include <fstream>

#include "kpg/errors.hpp"

namespace kpg {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json metrics_json(const Metrics& m) {
  ordered_json j;
  j["accuracy"] = m.accuracy;
  j["f1_per_class"] = m.f1_per_class;
  j["count"] = m.count;
  return j;
}

Metrics metrics_from_json(const json& j) {
  Metrics m;
  m.accuracy = j.at("accuracy").get<double>();
  m.f1_per_class = j.at("f1_per_class").get<std::vector<double>>();
  m.count = j.at("count").get<std::size_t>();
  return m;
}

namespace {

ordered_json baselines_json(const std::map<std::string, Metrics>& b) {
  ordered_json j = ordered_json::object();
  for (const auto& [name, m] : b) j[name] = metrics_json(m);
  return j;
}

std::map<std::string, Metrics> baselines_from_json(const json& j) {
  std::map<std::string, Metrics> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = metrics_from_json(it.value());
  return out;
}

}  // namespace

ordered_json report_json(const ExperimentReport& r) {
  ordered_json j;
  j["config_hash"] = r.config_hash;
  j["dataset_hash"] = r.dataset_hash;
  j["classes"] = r.classes;
  ordered_json folds = ordered_json::array();
  for (const auto& f : r.folds) {
    ordered_json fj = metrics_json(f.kpg);
    fj["fold"] = f.fold;
    fj["wall_time_s"] = f.wall_time_s;
    fj["steps"] = f.steps;
    fj["max_steps"] = f.max_steps;
    fj["kpg_epochs"] = f.kpg_epochs;
    fj["mean_key_graph_size"] = f.mean_key_graph_size;
    fj["baselines"] = baselines_json(f.baselines);
    folds.push_back(fj);
  }
  j["per_fold"] = folds;
  ordered_json agg = metrics_json(r.aggregate);
  agg["wall_time_s"] = r.wall_time_s;
  agg["steps"] = r.steps;
  agg["baselines"] = baselines_json(r.aggregate_baselines);
  j["aggregate"] = agg;
  return j;
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport r;
  try {
    r.config_hash = j.at("config_hash").get<std::string>();
    r.dataset_hash = j.at("dataset_hash").get<std::string>();
    r.classes = j.at("classes").get<int>();
    for (const auto& fj : j.at("per_fold")) {
      FoldReport f;
      f.kpg = metrics_from_json(fj);
      f.fold = fj.at("fold").get<int>();
      f.wall_time_s = fj.at("wall_time_s").get<double>();
      f.steps = fj.at("steps").get<long long>();
      f.max_steps = fj.at("max_steps").get<int>();
      f.kpg_epochs = fj.at("kpg_epochs").get<int>();
      f.mean_key_graph_size = fj.at("mean_key_graph_size").get<double>();
      f.baselines = baselines_from_json(fj.at("baselines"));
      r.folds.push_back(std::move(f));
    }
    const auto& agg = j.at("aggregate");
    r.aggregate = metrics_from_json(agg);
    r.wall_time_s = agg.at("wall_time_s").get<double>();
    r.steps = agg.at("steps").get<long long>();
    r.aggregate_baselines = baselines_from_json(agg.at("baselines"));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed metrics document: ") + e.what());
  }
  return r;
}

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::string report_csv(const ExperimentReport& r) {
  std::string out = "config_hash,scope,model,accuracy";
  for (int c = 0; c < r.classes; ++c) out += ",f1_c" + std::to_string(c);
  out += ",count,wall_time_s,steps\n";
  auto row = [&](const std::string& scope, const std::string& model, const Metrics& m,
                 double wall, long long steps) {
    out += r.config_hash + "," + scope + "," + model + "," + csv_number(m.accuracy);
    for (int c = 0; c < r.classes; ++c) {
      const auto i = static_cast<std::size_t>(c);
      out += "," + csv_number(i < m.f1_per_class.size() ? m.f1_per_class[i] : 0.0);
    }
    out += "," + std::to_string(m.count) + "," + csv_number(wall) + "," + std::to_string(steps) +
           "\n";
  };
  for (const auto& f : r.folds) {
    const std::string scope = "fold" + std::to_string(f.fold);
    row(scope, "kpg", f.kpg, f.wall_time_s, f.steps);
    for (const auto& [name, m] : f.baselines) row(scope, name, m, 0.0, 0);
  }
  row("aggregate", "kpg", r.aggregate, r.wall_time_s, r.steps);
  for (const auto& [name, m] : r.aggregate_baselines) row("aggregate", name, m, 0.0, 0);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& report) {
  std::filesystem::create_directories(dir);
  write_text(dir / "metrics.json", report_json(report).dump(2) + "\n");
  write_text(dir / "metrics.csv", report_csv(report));
}

}  // namespace kpg
