#pragma once

#include <filesystem>
#include <string>

#include "kpg/pipeline/experiment.hpp"
#include "json.hpp"

namespace kpg {

nlohmann::ordered_json metrics_json(const Metrics& m);
Metrics metrics_from_json(const nlohmann::json& j);

/// Per-fold and pooled metrics with the config hash. Predictions are left out.
nlohmann::ordered_json report_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// One row per (scope, model): scope is "fold<k>" or "aggregate", model is
/// "kpg", "bigcn_full" or "root_only".
std::string report_csv(const ExperimentReport& report);

/// Writes metrics.json and metrics.csv into `dir` (created if missing).
void write_report(const std::filesystem::path& dir, const ExperimentReport& report);

/// Writes text atomically enough for our purposes: the whole string at once.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Fixed-format number used in every CSV we emit.
std::string csv_number(double x);

}  // namespace kpg
