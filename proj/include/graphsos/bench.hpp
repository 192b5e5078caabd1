#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphsos/attention.hpp"
#include "graphsos/backend.hpp"
#include "graphsos/encoder.hpp"
#include "graphsos/graph.hpp"
#include "graphsos/graph_io.hpp"
#include "graphsos/serialization.hpp"

namespace graphsos {

struct BenchExample {
  TextGraph graph;
  std::string question;
  std::string gold;
};

/// Records lacking a question or answer are rejected with FormatError.
std::vector<BenchExample> bench_examples_from_records(const std::vector<GraphRecord>& records);

struct TrialResult {
  std::size_t trial = 0;
  std::vector<bool> correct;
  double accuracy = 0.0;
  std::size_t errors = 0;
};

struct TrialStats {
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  std::size_t trials = 0;
};

/// Routes each example through the order selector instead of one random ordering.
struct OsmRouting {
  AttentionParamsd params;
  EncoderHandle encoder = EncoderHandle::builtin(64, 1, true);
  std::size_t m = 10;
  double tau = 0.5;
};

struct BenchConfig {
  std::size_t trials = 10;
  std::uint64_t base_seed = 0;
  SerializationKind kind = SerializationKind::FeatureEdge;
  bool pin_identity_first = false;
  int concurrency = 1;
  std::vector<std::string> labels;
  std::optional<OsmRouting> osm;
};

struct BenchReport {
  std::vector<TrialResult> trials;
  TrialStats stats;
  std::size_t errors = 0;
};

/// Trial t draws a fresh ordering per example from seed base_seed + t, renders
/// the answer prompt, queries the backend and grades the reply. Backend errors
/// count as incorrect and are tallied separately.
BenchReport run_order_trials(const std::vector<BenchExample>& dataset, LlmBackend& backend, const BenchConfig& config);

/// Lowercase, punctuation to spaces, whitespace collapsed.
std::string normalize_answer(std::string_view text);

/// With labels: the gold label must occur (as whole words) and no other label
/// may occur earlier. Without: normalized gold must be a substring.
bool grade_answer(std::string_view response, std::string_view gold, const std::vector<std::string>& labels = {});

/// Descriptive statistics with linearly interpolated quartiles.
TrialStats summarize(const std::vector<double>& accuracies);
TrialStats summarize(const std::vector<TrialResult>& results);

/// Probability that a uniformly random ordering of `graph` equals the identity.
double identity_hit_probability(const TextGraph& graph, SerializationKind kind);

/// CSV `trial,accuracy,errors`.
void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialResult>& trials);
std::string stats_to_json(const TrialStats& stats, std::size_t errors);

}  // namespace graphsos
