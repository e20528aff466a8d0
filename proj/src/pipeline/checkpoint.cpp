#include "kpg/pipeline/checkpoint.hpp"

#include <fstream>

#include "json.hpp"
#include "kpg/errors.hpp"
#include "kpg/pipeline/report.hpp"

namespace kpg {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json blocks_json(const std::vector<const BlockParams*>& blocks) {
  ordered_json arr = ordered_json::array();
  for (const auto* b : blocks) {
    ordered_json bj;
    bj["block"] = b->name();
    bj["step"] = b->step;
    ordered_json params = ordered_json::array();
    for (const auto& p : b->all()) {
      ordered_json pj;
      pj["name"] = p.name;
      pj["rows"] = p.value.rows();
      pj["cols"] = p.value.cols();
      std::vector<double> data;
      data.reserve(static_cast<std::size_t>(p.value.size()));
      for (Index r = 0; r < p.value.rows(); ++r) {
        for (Index c = 0; c < p.value.cols(); ++c) data.push_back(p.value(r, c));
      }
      pj["data"] = data;
      params.push_back(pj);
    }
    bj["params"] = params;
    arr.push_back(bj);
  }
  return arr;
}

void load_blocks(const json& arr, const std::vector<BlockParams*>& blocks,
                 const std::string& model) {
  if (!arr.is_array() || arr.size() != blocks.size()) {
    throw DataError("checkpoint: model '" + model + "' has the wrong number of blocks");
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const json& bj = arr[i];
    BlockParams& b = *blocks[i];
    if (bj.at("block").get<std::string>() != b.name()) {
      throw DataError("checkpoint: expected block '" + b.name() + "' in model '" + model + "'");
    }
    b.step = bj.at("step").get<std::int64_t>();
    const json& params = bj.at("params");
    if (params.size() != b.size()) {
      throw DataError("checkpoint: block '" + b.name() + "' has the wrong number of tensors");
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
      Parameter& p = b[k];
      const json& pj = params[k];
      const auto rows = pj.at("rows").get<Index>();
      const auto cols = pj.at("cols").get<Index>();
      const auto data = pj.at("data").get<std::vector<double>>();
      if (pj.at("name").get<std::string>() != p.name || rows != p.value.rows() ||
          cols != p.value.cols() || static_cast<Index>(data.size()) != rows * cols) {
        throw DataError("checkpoint: tensor " + b.name() + "." + p.name +
                        " does not match the configured shape");
      }
      for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) p.value(r, c) = data[static_cast<std::size_t>(r * cols + c)];
      }
    }
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ExperimentConfig& config,
                     const TrainedFold& m) {
  ordered_json j;
  j["config"] = config.canonical();
  j["config_hash"] = config.hash();
  j["classes"] = m.classes;
  j["steps"] = m.steps;
  j["has_text"] = m.has_text;
  j["vocab"] = {{"tokens", m.vocab.tokens()},
                {"document_frequencies", m.vocab.document_frequencies()},
                {"documents", m.vocab.documents()}};
  ordered_json models;
  models["reward_model"] = blocks_json(m.reward_model.blocks());
  models["ens"] = blocks_json(m.kpg.ens.blocks());
  models["crg"] = blocks_json(m.kpg.crg.blocks());
  models["downstream"] = blocks_json(m.downstream.blocks());
  if (m.has_text) models["text"] = blocks_json(m.text.blocks());
  j["models"] = models;
  write_text(path, j.dump() + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read checkpoint " + path.string());
  Checkpoint ck;
  try {
    const json j = json::parse(in);
    const auto text = j.at("config").get<std::string>();
    try {
      ck.config = parse_config_text(text);
    } catch (const ConfigError& e) {
      throw DataError(std::string("checkpoint config is invalid: ") + e.what());
    }
    if (ck.config.hash() != j.at("config_hash").get<std::string>()) {
      throw DataError("checkpoint config hash mismatch in " + path.string());
    }
    TrainedFold& m = ck.models;
    m.classes = j.at("classes").get<int>();
    m.steps = j.at("steps").get<int>();
    m.has_text = j.at("has_text").get<bool>();
    const json& v = j.at("vocab");
    m.vocab = Vocabulary(v.at("tokens").get<std::vector<std::string>>(),
                         v.at("document_frequencies").get<std::vector<int>>(),
                         v.at("documents").get<std::size_t>());
    const auto width = static_cast<Index>(m.vocab.size());
    m.reward_model = BiGcn(width, ck.config.hidden, m.classes);
    m.kpg = KpgModels(width, width, ck.config, m.classes);
    m.downstream = BiGcn(width, ck.config.hidden, m.classes);
    const json& models = j.at("models");
    load_blocks(models.at("reward_model"), m.reward_model.blocks(), "reward_model");
    load_blocks(models.at("ens"), m.kpg.ens.blocks(), "ens");
    load_blocks(models.at("crg"), m.kpg.crg.blocks(), "crg");
    load_blocks(models.at("downstream"), m.downstream.blocks(), "downstream");
    if (m.has_text) {
      m.text = TextHead(width, m.classes);
      load_blocks(models.at("text"), m.text.blocks(), "text");
    }
  } catch (const json::exception& e) {
    throw DataError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  return ck;
}

}  // namespace kpg
