#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "graphsos/graph.hpp"
#include "graphsos/rng.hpp"

namespace graphsos::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(GRAPHSOS_FIXTURES) / name;
}

/// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("graphsos_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Random graph with up to `max_nodes` nodes, sparse non-contiguous ids and
/// text drawn from an alphabet heavy in separator characters.
inline TextGraph random_text_graph(Rng& rng, std::size_t max_nodes) {
  static const std::string alphabet = "abc XYZ019|[]()\\,:\n-_.'\"";
  const std::size_t n = 1 + rng.below(max_nodes);
  std::vector<NodeRecord> nodes;
  NodeId id = static_cast<NodeId>(rng.below(5));
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    const std::size_t len = rng.below(12);
    for (std::size_t c = 0; c < len; ++c) text += alphabet[rng.below(alphabet.size())];
    nodes.push_back({id, text, std::nullopt});
    id += 1 + static_cast<NodeId>(rng.below(3));
  }
  std::vector<Edge> edges;
  const std::size_t m = n > 1 ? rng.below(2 * n) : 0;
  for (std::size_t e = 0; e < m; ++e) {
    const auto& a = nodes[rng.below(n)];
    const auto& b = nodes[rng.below(n)];
    if (a.id != b.id) edges.push_back({a.id, b.id});
  }
  return TextGraph(std::move(nodes), std::move(edges));
}

}  // namespace graphsos::test
