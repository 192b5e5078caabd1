#include "graphsos/graph_io.hpp"

#include <fstream>

#include "graphsos/errors.hpp"
#include "json.hpp"

namespace graphsos {

using nlohmann::json;

GraphRecord parse_graph_record(const std::string& line, bool directed) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw FormatError("graph record must be a JSON object");

  try {
    std::vector<NodeRecord> nodes;
    for (const auto& n : j.value("nodes", json::array())) {
      NodeRecord rec;
      rec.id = n.at("id").get<NodeId>();
      if (n.contains("text") && !n["text"].is_null()) rec.text = n["text"].get<std::string>();
      if (n.contains("label") && !n["label"].is_null()) {
        const auto& l = n["label"];
        rec.label = l.is_string() ? l.get<std::string>() : l.dump();
      }
      nodes.push_back(std::move(rec));
    }
    std::vector<Edge> edges;
    for (const auto& e : j.value("edges", json::array())) {
      if (!e.is_array() || e.size() != 2) throw FormatError("edge must be a [u, v] pair");
      edges.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
    }
    std::vector<Triple> triples;
    for (const auto& t : j.value("triples", json::array())) {
      if (!t.is_array() || t.size() != 3) throw FormatError("triple must be a [s, r, o] array");
      triples.push_back({t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
    }
    GraphRecord rec{TextGraph(std::move(nodes), std::move(edges), std::move(triples),
                              GraphOptions{directed, false}),
                    std::nullopt, std::nullopt};
    if (j.contains("question") && j["question"].is_string()) rec.question = j["question"].get<std::string>();
    if (j.contains("answer") && j["answer"].is_string()) rec.answer = j["answer"].get<std::string>();
    return rec;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed graph record: ") + e.what());
  }
}

std::string dump_graph_record(const GraphRecord& record) {
  json nodes = json::array();
  for (const auto& n : record.graph.nodes()) {
    json o{{"id", n.id}};
    if (n.text) o["text"] = *n.text;
    if (n.label) o["label"] = *n.label;
    nodes.push_back(std::move(o));
  }
  json edges = json::array();
  for (const auto& e : record.graph.edges()) edges.push_back({e.u, e.v});
  json j{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  if (!record.graph.triples().empty()) {
    json triples = json::array();
    for (const auto& t : record.graph.triples()) triples.push_back({t.subject, t.relation, t.object});
    j["triples"] = std::move(triples);
  }
  if (record.question) j["question"] = *record.question;
  if (record.answer) j["answer"] = *record.answer;
  return j.dump();
}

std::vector<GraphRecord> read_graph_jsonl(const std::filesystem::path& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<GraphRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_graph_record(line, directed));
    } catch (const Error& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_graph_jsonl(const std::filesystem::path& path, const std::vector<GraphRecord>& records) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const auto& r : records) out << dump_graph_record(r) << '\n';
}

}  // namespace graphsos
