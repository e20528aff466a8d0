#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kpg/graph/tree.hpp"

namespace kpg {

/// Parses one JSONL event line:
/// {"event_id": str, "label": int,
///  "posts": [{"id": str, "parent_id": str|null, "time_offset_min": number, "text": str}, ...]}
/// Unknown fields are ignored.
PropagationTree parse_event(const std::string& line);

/// Reads every non-blank line of a JSONL file. Throws DataError when the file
/// cannot be opened and MalformedEventError for structurally invalid events.
std::vector<PropagationTree> ingest_jsonl(const std::filesystem::path& path);
std::vector<PropagationTree> ingest_jsonl(std::istream& in);

/// Single-line JSON for one event in the ingestion schema.
std::string serialize_event(const PropagationTree& tree);

void write_jsonl(const std::filesystem::path& path, const std::vector<PropagationTree>& trees);

}  // namespace kpg
