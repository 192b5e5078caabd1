#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphsos/graph.hpp"

namespace graphsos {

enum class SerializationKind { FeatureEdge, EdgeOnly, TripleList };

/// "feature-edge", "edge" or "triple".
std::string to_string(SerializationKind kind);
SerializationKind parse_kind(std::string_view name);

/// Element order used when rendering a graph. Each permutation lists indices
/// into the graph's nodes(), edges() and triples() respectively.
struct Ordering {
  std::vector<std::size_t> feature_perm;
  std::vector<std::size_t> edge_perm;
  std::vector<std::size_t> triple_perm;
  /// Seed that generated the permutations; empty for the identity ordering.
  std::optional<std::uint64_t> seed;

  bool is_identity() const;

  static Ordering identity(const TextGraph& graph);
  /// Independent uniform permutations drawn from `seed`.
  static Ordering random(const TextGraph& graph, std::uint64_t seed);

  bool operator==(const Ordering&) const = default;
};

struct SerializedGraph {
  std::string text;
  Ordering ordering;
  SerializationKind kind = SerializationKind::FeatureEdge;
};

SerializedGraph serialize(const TextGraph& graph, const Ordering& ordering, SerializationKind kind);

inline SerializedGraph serialize(const TextGraph& graph, SerializationKind kind) {
  return serialize(graph, Ordering::identity(graph), kind);
}

/// Inverse of serialize(). Edge-only text yields text-less nodes for every
/// endpoint; triple text yields a node-less graph carrying the triples.
TextGraph parse(std::string_view text, SerializationKind kind, GraphOptions options = {});

/// Candidate 0 is the identity; candidates 1..m-1 use seeds derived from `seed`.
std::vector<Ordering> gen_orderings(const TextGraph& graph, std::size_t m, std::uint64_t seed);

/// Escaping used inside node text and triple fields.
std::string escape_text(std::string_view raw, bool escape_comma = false);

/// Element sequences found in a rendered graph embedded in arbitrary surrounding
/// text (a prompt). Lists that are absent stay empty.
struct ListedElements {
  std::vector<NodeId> feature_ids;
  std::vector<Edge> edges;
  std::vector<Triple> triples;
};

ListedElements scan_listed_elements(std::string_view text);

/// Inversions / C(n, 2) relative to ascending order; 0 for fewer than two items.
template <typename T>
double normalized_kendall_distance(const std::vector<T>& seq) {
  const std::size_t n = seq.size();
  if (n < 2) return 0.0;
  std::size_t inversions = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (seq[j] < seq[i]) ++inversions;
  return static_cast<double>(inversions) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

}  // namespace graphsos
