#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphsos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph construction violated an invariant (self-loop, dangling endpoint, ...).
class GraphError : public Error {
 public:
  using Error::Error;
};

/// A node id or key was not found.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given input (e.g. homophily over zero edges).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Input is missing attributes required by the requested rendering or file format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Syntactically malformed serialized text. `offset()` is the byte position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed text that describes an invalid graph (duplicate ids, unknown endpoints).
class SemanticError : public Error {
 public:
  using Error::Error;
};

/// Embedding table has no vector for the requested key.
class MissingEmbeddingError : public LookupError {
 public:
  explicit MissingEmbeddingError(const std::string& key)
      : LookupError("missing embedding for key '" + key + "'"), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A remote backend could not be reached or returned garbage.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts)
      : Error(what + " (after " + std::to_string(attempts) + " attempt(s))"), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphsos
