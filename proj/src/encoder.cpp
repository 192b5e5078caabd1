#include "graphsos/encoder.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "graphsos/errors.hpp"
#include "graphsos/format.hpp"
#include "graphsos/rng.hpp"

namespace graphsos {

namespace {

std::uint64_t token_hash(std::string_view token, std::uint64_t seed) {
  std::uint64_t h = Rng::mix(seed) ^ 1469598103934665603ULL;
  for (unsigned char c : token) h = (h ^ c) * 1099511628211ULL;
  return Rng::mix(h);
}

bool needs_encoding(char c) {
  return c == '%' || std::isspace(static_cast<unsigned char>(c)) || !std::isprint(static_cast<unsigned char>(c));
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) {
      cur += static_cast<char>(std::tolower(uc));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

EncoderHandle EncoderHandle::builtin(int dim, std::uint64_t seed, bool positional) {
  if (dim < 1 || (positional && dim < 2)) throw DimensionError("encoder dimension too small");
  EncoderHandle h;
  h.dim_ = dim;
  h.seed_ = seed;
  h.positional_ = positional;
  return h;
}

EncoderHandle EncoderHandle::table(std::map<std::string, EmbeddingVector> vectors, int dim) {
  for (const auto& [key, vec] : vectors)
    if (vec.size() != dim) throw DimensionError("embedding for '" + key + "' has wrong dimension");
  EncoderHandle h;
  h.dim_ = dim;
  h.table_ = std::make_shared<const std::map<std::string, EmbeddingVector>>(std::move(vectors));
  return h;
}

EmbeddingVector EncoderHandle::embed(std::string_view text) const {
  if (table_) {
    auto it = table_->find(std::string(text));
    if (it == table_->end()) throw MissingEmbeddingError(std::string(text));
    return it->second;
  }
  EmbeddingVector v = EmbeddingVector::Zero(dim_);
  const auto tokens = tokenize(text);
  if (tokens.empty()) return v;
  if (!positional_) {
    for (const auto& t : tokens) v[static_cast<Eigen::Index>(token_hash(t, seed_) % dim_)] += 1.0;
  } else {
    const int half = dim_ / 2;
    const double span = tokens.size() > 1 ? static_cast<double>(tokens.size() - 1) : 1.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto bucket = static_cast<Eigen::Index>(token_hash(tokens[i], seed_) % half);
      const double pos = tokens.size() > 1 ? static_cast<double>(i) / span : 0.5;
      v[bucket] += 1.0;
      v[half + bucket] += 2.0 * pos - 1.0;
    }
  }
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

EmbeddingVector EncoderHandle::embed_node(const NodeRecord& node) const {
  if (table_) {
    auto it = table_->find(std::to_string(node.id));
    if (it != table_->end()) return it->second;
    if (node.text) return embed(*node.text);
    throw MissingEmbeddingError(std::to_string(node.id));
  }
  return embed(node.text.value_or(""));
}

const std::map<std::string, EmbeddingVector>& EncoderHandle::table_entries() const {
  static const std::map<std::string, EmbeddingVector> empty;
  return table_ ? *table_ : empty;
}

std::string percent_encode_key(std::string_view key) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : key) {
    if (needs_encoding(c)) {
      auto uc = static_cast<unsigned char>(c);
      out += '%';
      out += hex[uc >> 4];
      out += hex[uc & 0xF];
    } else {
      out += c;
    }
  }
  return out;
}

std::string percent_decode_key(std::string_view key) {
  std::string out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i] != '%') {
      out += key[i];
      continue;
    }
    if (i + 2 >= key.size()) throw FormatError("truncated percent escape");
    int hi = hex_value(key[i + 1]), lo = hex_value(key[i + 2]);
    if (hi < 0 || lo < 0) throw FormatError("invalid percent escape in key");
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

EncoderHandle load_embedding_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open embedding table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty embedding table");
  std::istringstream head(line);
  std::string word;
  int dim = 0;
  if (!(head >> word >> dim) || word != "dim" || dim < 1)
    throw FormatError("embedding table must start with 'dim <d>'");

  std::map<std::string, EmbeddingVector> vectors;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream row(line);
    std::string key;
    if (!(row >> key)) continue;
    std::vector<double> values;
    std::string tok;
    while (row >> tok) values.push_back(parse_double(tok));
    if (static_cast<int>(values.size()) != dim)
      throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                        " values, found " + std::to_string(values.size()));
    vectors[percent_decode_key(key)] = Eigen::Map<EmbeddingVector>(values.data(), dim);
  }
  return EncoderHandle::table(std::move(vectors), dim);
}

void write_embedding_table(const std::filesystem::path& path,
                           const std::map<std::string, EmbeddingVector>& vectors, int dim) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "dim " << dim << '\n';
  for (const auto& [key, vec] : vectors) {
    if (key.empty()) throw FormatError("embedding keys must be non-empty");
    if (vec.size() != dim) throw DimensionError("embedding for '" + key + "' has wrong dimension");
    out << percent_encode_key(key);
    for (Eigen::Index i = 0; i < vec.size(); ++i) out << ' ' << format_double(vec[i]);
    out << '\n';
  }
}

Eigen::MatrixXd embed_nodes(const EncoderHandle& encoder, const TextGraph& graph) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(graph.node_count()), encoder.dim());
  for (std::size_t i = 0; i < graph.node_count(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = encoder.embed_node(graph.nodes()[i]).transpose();
  return out;
}

}  // namespace graphsos
