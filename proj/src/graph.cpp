#include "graphsos/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_set>

#include "graphsos/errors.hpp"
#include "graphsos/rng.hpp"

namespace graphsos {

TextGraph::TextGraph(std::vector<NodeRecord> nodes, std::vector<Edge> edges,
                     std::vector<Triple> triples, GraphOptions options)
    : nodes_(std::move(nodes)), triples_(std::move(triples)), options_(options) {
  std::stable_sort(nodes_.begin(), nodes_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(triples_.begin(), triples_.end());
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.id < 0) throw GraphError("negative node id " + std::to_string(n.id));
    if (!index_.emplace(n.id, i).second)
      throw GraphError("duplicate node id " + std::to_string(n.id));
    if (n.text.has_value() != nodes_.front().text.has_value())
      throw GraphError("node text must be present on all nodes or none (node " +
                       std::to_string(n.id) + ")");
  }

  std::set<Edge> seen;
  edges_.reserve(edges.size());
  for (auto e : edges) {
    if (!contains(e.u) || !contains(e.v))
      throw GraphError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                       ") references an unknown node");
    if (e.u == e.v && !options_.allow_self_loops)
      throw GraphError("self-loop on node " + std::to_string(e.u));
    if (!options_.directed && e.u > e.v) std::swap(e.u, e.v);
    if (!seen.insert(e).second) {
      ++duplicates_dropped_;
      continue;
    }
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end());

  adjacency_.assign(nodes_.size(), {});
  for (const auto& e : edges_) {
    adjacency_[index_.at(e.u)].push_back(e.v);
    if (!options_.directed && e.u != e.v) adjacency_[index_.at(e.v)].push_back(e.u);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::size_t TextGraph::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw LookupError("unknown node id " + std::to_string(id));
  return it->second;
}

bool TextGraph::has_labels() const {
  return !nodes_.empty() &&
         std::all_of(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.label.has_value(); });
}

LabelAssignment TextGraph::labels() const {
  LabelAssignment out;
  for (const auto& n : nodes_)
    if (n.label) out.emplace(n.id, *n.label);
  return out;
}

bool same_graph(const TextGraph& a, const TextGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  if (a.directed() != b.directed()) return false;
  for (const auto& n : a.nodes()) {
    if (!b.contains(n.id) || !(b.node(n.id) == n)) return false;
  }
  std::set<Edge> ea(a.edges().begin(), a.edges().end());
  std::set<Edge> eb(b.edges().begin(), b.edges().end());
  if (ea != eb) return false;
  auto ta = a.triples(), tb = b.triples();
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  return ta == tb;
}

double edge_homophily(const TextGraph& graph, const LabelAssignment& labels) {
  if (graph.edges().empty()) throw MetricError("edge homophily is undefined for a graph with no edges");
  auto label_of = [&](NodeId id) -> const std::string& {
    auto it = labels.find(id);
    if (it == labels.end()) throw LookupError("node " + std::to_string(id) + " has no label");
    return it->second;
  };
  std::size_t same = 0;
  for (const auto& e : graph.edges())
    if (label_of(e.u) == label_of(e.v)) ++same;
  return static_cast<double>(same) / static_cast<double>(graph.edges().size());
}

std::vector<NodeId> k_hop_neighborhood(const TextGraph& graph, NodeId v, int k) {
  graph.index_of(v);
  std::vector<NodeId> out;
  if (k <= 0) return out;
  std::unordered_map<NodeId, int> dist{{v, 0}};
  std::deque<NodeId> frontier{v};
  while (!frontier.empty()) {
    NodeId c = frontier.front();
    frontier.pop_front();
    int dc = dist[c];
    if (dc == k) continue;
    for (NodeId u : graph.neighbors(c)) {
      if (dist.emplace(u, dc + 1).second) {
        out.push_back(u);
        frontier.push_back(u);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TextGraph induced_subgraph(const TextGraph& graph, const std::vector<NodeId>& keep) {
  std::unordered_set<NodeId> kept(keep.begin(), keep.end());
  std::vector<NodeRecord> nodes;
  for (const auto& n : graph.nodes())
    if (kept.count(n.id)) nodes.push_back(n);
  std::vector<Edge> edges;
  for (const auto& e : graph.edges())
    if (kept.count(e.u) && kept.count(e.v)) edges.push_back(e);
  return TextGraph(std::move(nodes), std::move(edges), graph.triples(), graph.options());
}

double same_class_fraction(const TextGraph& graph, NodeId target, const std::vector<NodeId>& members) {
  const auto& target_label = graph.node(target).label;
  if (!target_label) throw LookupError("node " + std::to_string(target) + " has no label");
  std::size_t same = 0, total = 0;
  for (NodeId id : members) {
    if (id == target) continue;
    ++total;
    const auto& l = graph.node(id).label;
    if (!l) throw LookupError("node " + std::to_string(id) + " has no label");
    if (*l == *target_label) ++same;
  }
  return total == 0 ? 0.0 : static_cast<double>(same) / static_cast<double>(total);
}

namespace {

const std::vector<std::vector<std::string>> kTopicWords = {
    {"neural", "network", "training", "gradient", "layer", "deep", "backpropagation", "activation",
     "convolution", "weights", "optimizer", "epoch"},
    {"protein", "gene", "cell", "expression", "sequence", "genome", "enzyme", "molecular",
     "mutation", "tissue", "receptor", "pathway"},
    {"query", "database", "index", "transaction", "schema", "relational", "storage", "join",
     "table", "sql", "retrieval", "cache"},
    {"theorem", "proof", "lemma", "algebra", "topology", "manifold", "integral", "bound",
     "polynomial", "conjecture", "graph", "invariant"},
    {"robot", "sensor", "control", "motion", "planning", "actuator", "trajectory", "kinematics",
     "navigation", "feedback", "localization", "servo"},
    {"market", "price", "economy", "trade", "inflation", "demand", "supply", "policy", "labor",
     "capital", "tax", "growth"},
};

const std::vector<std::string> kSharedWords = {"study", "method", "results", "approach",
                                               "analysis", "model", "paper", "evaluation"};

std::string class_word(int cls, std::size_t j) {
  if (cls < static_cast<int>(kTopicWords.size())) return kTopicWords[cls][j % kTopicWords[cls].size()];
  return "topic" + std::to_string(cls) + "w" + std::to_string(j % 12);
}

std::uint64_t string_seed(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

std::string node_text(const std::string& label, int cls, NodeId id, int words) {
  Rng rng(Rng::mix(string_seed(label)) ^ Rng::mix(static_cast<std::uint64_t>(id)));
  std::string out;
  for (int w = 0; w < words; ++w) {
    if (!out.empty()) out += ' ';
    if (rng.uniform() < 0.75)
      out += class_word(cls, rng.below(12));
    else
      out += kSharedWords[rng.below(kSharedWords.size())];
  }
  return out;
}

// Draws `count` distinct pairs from the pairs accepted by `keep`, either by
// enumeration or by rejection sampling when the node set is large.
template <typename Pred>
std::vector<Edge> draw_pairs(int n, std::size_t count, Pred keep, Rng& rng) {
  std::vector<Edge> out;
  if (count == 0) return out;
  if (n <= 2000) {
    std::vector<Edge> pool;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (keep(u, v)) pool.push_back({u, v});
    // partial Fisher-Yates
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
  }
  std::set<Edge> seen;
  while (out.size() < count) {
    NodeId u = static_cast<NodeId>(rng.below(n));
    NodeId v = static_cast<NodeId>(rng.below(n));
    if (u == v || !keep(u, v)) continue;
    Edge e{std::min(u, v), std::max(u, v)};
    if (seen.insert(e).second) out.push_back(e);
  }
  return out;
}

}  // namespace

TextGraph synth_planted_graph(const PlantedGraphConfig& config) {
  const int n = config.nodes;
  const int classes = config.classes;
  if (classes < 2 || n < classes)
    throw GraphError("planted graph needs n >= classes >= 2");
  if (!(config.target_homophily >= 0.0 && config.target_homophily <= 1.0))
    throw GraphError("target homophily must lie in [0, 1]");

  const auto edges_total =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * config.mean_degree / 2.0));
  const auto intra = static_cast<std::size_t>(
      std::llround(config.target_homophily * static_cast<double>(edges_total)));
  const std::size_t inter = edges_total - intra;

  std::size_t max_intra = 0;
  for (int c = 0; c < classes; ++c) {
    std::size_t size = static_cast<std::size_t>(n / classes + (c < n % classes ? 1 : 0));
    max_intra += size * (size - 1) / 2;
  }
  const std::size_t max_pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  if (intra > max_intra || inter > max_pairs - max_intra)
    throw GraphError("planted graph infeasible: " + std::to_string(n) + " nodes cannot host " +
                     std::to_string(intra) + " intra-class and " + std::to_string(inter) +
                     " inter-class edges");

  Rng rng(config.seed);
  auto cls = [classes](NodeId id) { return static_cast<int>(id % classes); };
  auto edges = draw_pairs(n, intra, [&](NodeId u, NodeId v) { return cls(u) == cls(v); }, rng);
  auto cross = draw_pairs(n, inter, [&](NodeId u, NodeId v) { return cls(u) != cls(v); }, rng);
  edges.insert(edges.end(), cross.begin(), cross.end());
  rng.shuffle(edges);

  std::vector<NodeRecord> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  for (NodeId id = 0; id < n; ++id) {
    std::string label = "class" + std::to_string(cls(id));
    nodes.push_back({id, node_text(label, cls(id), id, config.words_per_node), label});
  }
  return TextGraph(std::move(nodes), std::move(edges));
}

}  // namespace graphsos
