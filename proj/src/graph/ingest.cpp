#include "kpg/graph/ingest.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "kpg/errors.hpp"

namespace kpg {

using nlohmann::json;

PropagationTree parse_event(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("event line is not a JSON object");

  std::string event_id = "<unknown>";
  try {
    event_id = j.at("event_id").get<std::string>();
    const int label = j.at("label").get<int>();
    std::vector<Post> posts;
    for (const auto& jp : j.at("posts")) {
      Post p;
      p.id = jp.at("id").get<std::string>();
      const auto& parent = jp.at("parent_id");
      if (!parent.is_null()) p.parent_id = parent.get<std::string>();
      p.time_offset_min = jp.at("time_offset_min").get<double>();
      p.raw_text = jp.at("text").get<std::string>();
      posts.push_back(std::move(p));
    }
    return make_tree(std::move(event_id), label, std::move(posts));
  } catch (const json::exception& e) {
    throw MalformedEventError(event_id, e.what());
  }
}

std::vector<PropagationTree> ingest_jsonl(std::istream& in) {
  std::vector<PropagationTree> trees;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      trees.push_back(parse_event(line));
    } catch (const MalformedEventError&) {
      throw;
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trees;
}

std::vector<PropagationTree> ingest_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ingest_jsonl(in);
}

std::string serialize_event(const PropagationTree& tree) {
  json posts = json::array();
  for (const auto& p : tree.posts) {
    posts.push_back({{"id", p.id},
                     {"parent_id", p.parent_id ? json(*p.parent_id) : json(nullptr)},
                     {"time_offset_min", p.time_offset_min},
                     {"text", p.raw_text}});
  }
  json j = {{"event_id", tree.event_id}, {"label", tree.label}, {"posts", std::move(posts)}};
  return j.dump();
}

void write_jsonl(const std::filesystem::path& path, const std::vector<PropagationTree>& trees) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& t : trees) out << serialize_event(t) << '\n';
}

}  // namespace kpg
