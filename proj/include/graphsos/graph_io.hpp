#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graphsos/graph.hpp"

namespace graphsos {

/// One line of a graph interchange file.
struct GraphRecord {
  TextGraph graph;
  std::optional<std::string> question;
  std::optional<std::string> answer;
};

/// Parses one JSONL line: {"nodes": [{"id", "text"?, "label"?}], "edges": [[u, v]],
/// "triples"?: [[s, r, o]], "question"?, "answer"?}. Unknown fields are ignored.
/// Labels that are not strings are stored as their JSON text. `directed`
/// builds a directed graph (triples-backed KG data).
GraphRecord parse_graph_record(const std::string& line, bool directed = false);
std::string dump_graph_record(const GraphRecord& record);

std::vector<GraphRecord> read_graph_jsonl(const std::filesystem::path& path, bool directed = false);
void write_graph_jsonl(const std::filesystem::path& path, const std::vector<GraphRecord>& records);

}  // namespace graphsos
