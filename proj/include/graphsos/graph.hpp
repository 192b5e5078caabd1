#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace graphsos {

using NodeId = std::int64_t;

struct NodeRecord {
  NodeId id = 0;
  std::optional<std::string> text;
  std::optional<std::string> label;

  bool operator==(const NodeRecord&) const = default;
};

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;

  bool operator==(const Triple&) const = default;
  auto operator<=>(const Triple&) const = default;
};

/// Node id -> class string.
using LabelAssignment = std::map<NodeId, std::string>;

struct GraphOptions {
  bool directed = false;
  bool allow_self_loops = false;
};

/// Immutable node/edge/triple container for (text-attributed) graphs.
///
/// Storage is canonical: nodes by id, edges and triples sorted, undirected
/// edges normalized to u < v and deduplicated. The identity ordering renders
/// this canonical order. Either every node carries text or none does.
class TextGraph {
 public:
  TextGraph() = default;
  TextGraph(std::vector<NodeRecord> nodes, std::vector<Edge> edges,
            std::vector<Triple> triples = {}, GraphOptions options = {});

  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Triple>& triples() const { return triples_; }
  bool directed() const { return options_.directed; }
  const GraphOptions& options() const { return options_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Number of duplicate edges dropped during construction.
  std::size_t duplicate_edges_dropped() const { return duplicates_dropped_; }

  bool contains(NodeId id) const { return index_.count(id) != 0; }
  /// Position of `id` in nodes(). Throws LookupError.
  std::size_t index_of(NodeId id) const;
  const NodeRecord& node(NodeId id) const { return nodes_[index_of(id)]; }

  /// Outgoing neighbours (both directions when undirected), ascending by id.
  const std::vector<NodeId>& neighbors(NodeId id) const { return adjacency_[index_of(id)]; }

  bool has_text() const { return !nodes_.empty() && nodes_.front().text.has_value(); }
  bool has_labels() const;
  /// Labels of every labeled node.
  LabelAssignment labels() const;

 private:
  std::vector<NodeRecord> nodes_;
  std::vector<Edge> edges_;
  std::vector<Triple> triples_;
  GraphOptions options_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t duplicates_dropped_ = 0;
};

/// Same node records (order-insensitive by id), same edge set, same triple multiset.
bool same_graph(const TextGraph& a, const TextGraph& b);

/// Fraction of edges whose endpoints share a label. Throws MetricError on an
/// empty edge set and LookupError when an endpoint is unlabeled.
double edge_homophily(const TextGraph& graph, const LabelAssignment& labels);

/// Nodes at shortest-path distance 1..k from v, ascending.
std::vector<NodeId> k_hop_neighborhood(const TextGraph& graph, NodeId v, int k);

/// Subgraph on `keep` with every original edge whose endpoints both survive.
/// Ids not present in the graph are ignored.
TextGraph induced_subgraph(const TextGraph& graph, const std::vector<NodeId>& keep);

/// Fraction of `members` (other than `target`) whose label equals the target's.
/// Returns 0 when there are no other members.
double same_class_fraction(const TextGraph& graph, NodeId target,
                           const std::vector<NodeId>& members);

struct PlantedGraphConfig {
  int nodes = 100;
  int classes = 2;
  double target_homophily = 0.5;
  std::uint64_t seed = 0;
  /// Edges drawn = round(nodes * mean_degree / 2).
  double mean_degree = 6.0;
  int words_per_node = 8;
};

/// Labeled graph with balanced classes (label = "class<id % classes>") whose
/// edge homophily is round(target * |E|) / |E|. Node text is drawn from a
/// per-class vocabulary plus a shared one, seeded by (label, id).
TextGraph synth_planted_graph(const PlantedGraphConfig& config);

inline TextGraph synth_planted_graph(int n, int classes, double target_h, std::uint64_t seed) {
  PlantedGraphConfig config;
  config.nodes = n;
  config.classes = classes;
  config.target_homophily = target_h;
  config.seed = seed;
  return synth_planted_graph(config);
}

}  // namespace graphsos
