#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "graphsos/graph.hpp"

namespace graphsos {

using EmbeddingVector = Eigen::VectorXd;

/// Lowercased alphanumeric runs of `text`.
std::vector<std::string> tokenize(std::string_view text);

/// Produces fixed-width embeddings for node texts, questions and serialized graphs.
///
/// Two variants exist. The built-in one hashes tokens into `dim` buckets and
/// L2-normalizes the counts (empty text maps to the zero vector). With
/// `positional` set, the first half of the buckets hold counts and the second
/// half hold, per bucket, the sum of (2p - 1) over token positions p in [0, 1],
/// which makes the vector depend on element order. The table variant returns
/// vectors loaded from a file.
class EncoderHandle {
 public:
  static EncoderHandle builtin(int dim = 64, std::uint64_t seed = 1, bool positional = false);
  static EncoderHandle table(std::map<std::string, EmbeddingVector> vectors, int dim);

  int dim() const { return dim_; }
  bool is_table() const { return table_ != nullptr; }
  bool positional() const { return positional_; }
  std::uint64_t seed() const { return seed_; }

  /// Throws MissingEmbeddingError for table misses.
  EmbeddingVector embed(std::string_view text) const;

  /// Table lookup by node id first, then by node text; built-in embeds the text.
  EmbeddingVector embed_node(const NodeRecord& node) const;

  const std::map<std::string, EmbeddingVector>& table_entries() const;

 private:
  EncoderHandle() = default;

  int dim_ = 64;
  std::uint64_t seed_ = 1;
  bool positional_ = false;
  std::shared_ptr<const std::map<std::string, EmbeddingVector>> table_;
};

/// Reads `dim <d>` followed by `<key> <f1> ... <fd>` rows. Keys are percent-encoded.
EncoderHandle load_embedding_table(const std::filesystem::path& path);
void write_embedding_table(const std::filesystem::path& path,
                           const std::map<std::string, EmbeddingVector>& vectors, int dim);

std::string percent_encode_key(std::string_view key);
std::string percent_decode_key(std::string_view key);

/// Row i holds embed_node() of graph.nodes()[i].
Eigen::MatrixXd embed_nodes(const EncoderHandle& encoder, const TextGraph& graph);

}  // namespace graphsos
