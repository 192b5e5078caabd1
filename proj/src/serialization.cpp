#include "graphsos/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <unordered_set>

#include "graphsos/errors.hpp"
#include "graphsos/rng.hpp"

namespace graphsos {

namespace {

constexpr std::string_view kFeatureHead = "Feature List: [";
constexpr std::string_view kEdgeHead = "Edge List: [";
constexpr std::string_view kTripleHead = "Triple List: [";

std::vector<std::size_t> iota_perm(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

bool is_bijection(const std::vector<std::size_t>& perm, std::size_t n) {
  if (perm.size() != n) return false;
  std::vector<bool> hit(n, false);
  for (auto i : perm) {
    if (i >= n || hit[i]) return false;
    hit[i] = true;
  }
  return true;
}

void render_edges(std::string& out, const TextGraph& graph, const std::vector<std::size_t>& perm) {
  out += kEdgeHead;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto& e = graph.edges()[perm[i]];
    if (i) out += ' ';
    out += '(';
    out += std::to_string(e.u);
    out += ", ";
    out += std::to_string(e.v);
    out += ')';
  }
  out += ']';
}

class Parser {
 public:
  explicit Parser(std::string_view text, std::size_t pos = 0) : text_(text), pos_(pos) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void expect(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) != lit) fail("expected '" + std::string(lit) + "'");
    pos_ += lit.size();
  }

  bool accept(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) != lit) return false;
    pos_ += lit.size();
    return true;
  }

  NodeId id() {
    NodeId value = 0;
    auto begin = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == begin || *begin == '-') fail("expected node id");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  // Reads escaped text up to (not including) the first unescaped character in `stops`.
  std::string escaped(std::string_view stops) {
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated text");
      char c = text_[pos_];
      if (stops.find(c) != std::string_view::npos) return out;
      if (c == '\\') {
        ++pos_;
        if (at_end()) fail("dangling escape");
        switch (text_[pos_]) {
          case '\\': out += '\\'; break;
          case 'p': out += '|'; break;
          case '[': out += '['; break;
          case ']': out += ']'; break;
          case '(': out += '('; break;
          case ')': out += ')'; break;
          case 'n': out += '\n'; break;
          case ',': out += ','; break;
          default: fail("unknown escape");
        }
        ++pos_;
        continue;
      }
      if (c == '[' || c == '(' || c == ')') fail("unescaped delimiter in text");
      out += c;
      ++pos_;
    }
  }

  std::vector<NodeRecord> feature_list() {
    expect(kFeatureHead);
    std::vector<NodeRecord> nodes;
    if (accept("]")) return nodes;
    while (true) {
      expect("Node ");
      NodeId nid = id();
      expect(": ");
      std::string body = escaped("|]");
      if (accept("]")) {
        nodes.push_back({nid, std::move(body), std::nullopt});
        return nodes;
      }
      // separator is " | ": the space before '|' belongs to it
      if (body.empty() || body.back() != ' ') fail("expected ' | ' separator");
      body.pop_back();
      expect("| ");
      nodes.push_back({nid, std::move(body), std::nullopt});
    }
  }

  std::vector<Edge> edge_list() {
    expect(kEdgeHead);
    std::vector<Edge> edges;
    if (accept("]")) return edges;
    while (true) {
      expect("(");
      NodeId u = id();
      expect(", ");
      NodeId v = id();
      expect(")");
      edges.push_back({u, v});
      if (accept("]")) return edges;
      expect(" ");
    }
  }

  std::vector<Triple> triple_list() {
    expect(kTripleHead);
    std::vector<Triple> triples;
    if (accept("]")) return triples;
    while (true) {
      expect("(");
      Triple t;
      t.subject = escaped(",)");
      expect(", ");
      t.relation = escaped(",)");
      expect(", ");
      t.object = escaped(",)");
      expect(")");
      triples.push_back(std::move(t));
      if (accept("]")) return triples;
      expect(" ");
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_;
};

}  // namespace

std::string to_string(SerializationKind kind) {
  switch (kind) {
    case SerializationKind::FeatureEdge: return "feature-edge";
    case SerializationKind::EdgeOnly: return "edge";
    case SerializationKind::TripleList: return "triple";
  }
  return "?";
}

SerializationKind parse_kind(std::string_view name) {
  if (name == "feature-edge") return SerializationKind::FeatureEdge;
  if (name == "edge") return SerializationKind::EdgeOnly;
  if (name == "triple") return SerializationKind::TripleList;
  throw FormatError("unknown serialization kind '" + std::string(name) + "'");
}

bool Ordering::is_identity() const {
  auto ascending = [](const std::vector<std::size_t>& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] != i) return false;
    return true;
  };
  return ascending(feature_perm) && ascending(edge_perm) && ascending(triple_perm);
}

Ordering Ordering::identity(const TextGraph& graph) {
  return {iota_perm(graph.node_count()), iota_perm(graph.edge_count()),
          iota_perm(graph.triples().size()), std::nullopt};
}

Ordering Ordering::random(const TextGraph& graph, std::uint64_t seed) {
  Ordering o = identity(graph);
  Rng rng(seed);
  rng.shuffle(o.feature_perm);
  rng.shuffle(o.edge_perm);
  rng.shuffle(o.triple_perm);
  o.seed = seed;
  return o;
}

std::string escape_text(std::string_view raw, bool escape_comma) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '|': out += "\\p"; break;
      case '[': out += "\\["; break;
      case ']': out += "\\]"; break;
      case '(': out += "\\("; break;
      case ')': out += "\\)"; break;
      case '\n': out += "\\n"; break;
      case ',':
        out += escape_comma ? "\\," : ",";
        break;
      default: out += c;
    }
  }
  return out;
}

SerializedGraph serialize(const TextGraph& graph, const Ordering& ordering, SerializationKind kind) {
  if (!is_bijection(ordering.feature_perm, graph.node_count()) ||
      !is_bijection(ordering.edge_perm, graph.edge_count()) ||
      !is_bijection(ordering.triple_perm, graph.triples().size()))
    throw FormatError("ordering does not match the graph's element counts");

  std::string out;
  switch (kind) {
    case SerializationKind::FeatureEdge: {
      if (graph.node_count() > 0 && !graph.has_text())
        throw FormatError("feature+edge rendering requires node text");
      out += kFeatureHead;
      for (std::size_t i = 0; i < ordering.feature_perm.size(); ++i) {
        const auto& n = graph.nodes()[ordering.feature_perm[i]];
        if (i) out += " | ";
        out += "Node ";
        out += std::to_string(n.id);
        out += ": ";
        out += escape_text(*n.text);
      }
      out += "], ";
      render_edges(out, graph, ordering.edge_perm);
      break;
    }
    case SerializationKind::EdgeOnly:
      render_edges(out, graph, ordering.edge_perm);
      break;
    case SerializationKind::TripleList: {
      if (graph.triples().empty()) throw FormatError("triple-list rendering requires triples");
      out += kTripleHead;
      for (std::size_t i = 0; i < ordering.triple_perm.size(); ++i) {
        const auto& t = graph.triples()[ordering.triple_perm[i]];
        if (i) out += ' ';
        out += '(';
        out += escape_text(t.subject, true);
        out += ", ";
        out += escape_text(t.relation, true);
        out += ", ";
        out += escape_text(t.object, true);
        out += ')';
      }
      out += ']';
      break;
    }
  }
  return {std::move(out), ordering, kind};
}

TextGraph parse(std::string_view text, SerializationKind kind, GraphOptions options) {
  Parser p(text);
  std::vector<NodeRecord> nodes;
  std::vector<Edge> edges;
  std::vector<Triple> triples;
  switch (kind) {
    case SerializationKind::FeatureEdge:
      nodes = p.feature_list();
      p.expect(", ");
      edges = p.edge_list();
      break;
    case SerializationKind::EdgeOnly: {
      edges = p.edge_list();
      std::vector<NodeId> ids;
      for (const auto& e : edges) {
        ids.push_back(e.u);
        ids.push_back(e.v);
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      for (NodeId id : ids) nodes.push_back({id, std::nullopt, std::nullopt});
      break;
    }
    case SerializationKind::TripleList:
      triples = p.triple_list();
      break;
  }
  if (!p.at_end()) p.fail("trailing characters");

  std::unordered_set<NodeId> ids;
  for (const auto& n : nodes)
    if (!ids.insert(n.id).second) throw SemanticError("duplicate node id " + std::to_string(n.id));
  for (const auto& e : edges)
    if (!ids.count(e.u) || !ids.count(e.v))
      throw SemanticError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                          ") references an unknown node");
  try {
    return TextGraph(std::move(nodes), std::move(edges), std::move(triples), options);
  } catch (const GraphError& e) {
    throw SemanticError(e.what());
  }
}

std::vector<Ordering> gen_orderings(const TextGraph& graph, std::size_t m, std::uint64_t seed) {
  std::vector<Ordering> out;
  out.reserve(m);
  if (m == 0) throw Error("gen_orderings: m must be at least 1");
  out.push_back(Ordering::identity(graph));
  for (std::size_t i = 1; i < m; ++i) out.push_back(Ordering::random(graph, Rng::mix(seed ^ Rng::mix(i))));
  return out;
}

ListedElements scan_listed_elements(std::string_view text) {
  ListedElements out;
  if (auto at = text.find(kFeatureHead); at != std::string_view::npos) {
    Parser p(text, at);
    for (const auto& n : p.feature_list()) out.feature_ids.push_back(n.id);
  }
  if (auto at = text.find(kEdgeHead); at != std::string_view::npos) {
    Parser p(text, at);
    out.edges = p.edge_list();
  }
  if (auto at = text.find(kTripleHead); at != std::string_view::npos) {
    Parser p(text, at);
    out.triples = p.triple_list();
  }
  return out;
}

}  // namespace graphsos
