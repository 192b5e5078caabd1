#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "graphsos/attention.hpp"
#include "graphsos/backend.hpp"
#include "graphsos/encoder.hpp"
#include "graphsos/graph.hpp"
#include "graphsos/optim.hpp"
#include "graphsos/rng.hpp"
#include "graphsos/serialization.hpp"

namespace graphsos {

struct GumbelMask {
  Eigen::VectorXd soft;
  std::size_t hard = 0;
  double tau = 1.0;
  /// The Gumbel draws g_i that produced `soft`.
  Eigen::VectorXd noise;
};

/// soft = softmax((logits + g) / tau) with g_i = -log(-log U_i); hard is the
/// argmax of soft, ties to the lowest index.
GumbelMask gumbel_softmax(const Eigen::VectorXd& logits, double tau, Rng& rng);
GumbelMask gumbel_softmax_with_noise(const Eigen::VectorXd& logits, const Eigen::VectorXd& noise, double tau);

struct OrderCandidateSet {
  std::vector<SerializedGraph> candidates;
  std::string question;
};

/// m renderings of `graph` from gen_orderings(graph, m, seed).
OrderCandidateSet build_candidates(const TextGraph& graph, const std::string& question, std::size_t m,
                                   std::uint64_t seed, SerializationKind kind);

struct OrderSelection {
  std::size_t index = 0;
  SerializedGraph chosen;
  GumbelMask mask;
  Eigen::VectorXd weights;
};

/// Cross-attends the question (query) over the candidate renderings (keys) and
/// picks one with Gumbel-softmax over the log attention weights.
OrderSelection select_order(const OrderCandidateSet& candidates, const AttentionParamsd& params,
                            const EncoderHandle& encoder, double tau, Rng& rng);

struct OsmExample {
  TextGraph graph;
  std::string question;
  std::string target;
};

struct TrainOsmConfig {
  std::size_t m = 10;
  double tau = 0.5;
  std::size_t steps = 300;
  double lr = 0.05;
  /// Score all m candidates and differentiate sum_i soft_i * NLL_i; otherwise
  /// only the chosen candidate is scored (straight-through).
  bool exact_expectation = false;
  /// Straight-through only: the chosen NLL is centered on a moving average.
  double baseline_decay = 0.9;
  double clip_norm = 1.0;
  Optimizer optimizer = Optimizer::Adam;
  std::uint64_t seed = 0;
  SerializationKind kind = SerializationKind::FeatureEdge;
  int concurrency = 1;
  int backend_attempts = 3;
};

struct TrainOsmResult {
  AttentionParamsd params;
  /// NLL of the chosen candidate per completed step.
  std::vector<double> losses;
  std::size_t skipped_steps = 0;
};

/// Trains the selector against a frozen backend's NLL. The backend is only
/// queried, never updated.
TrainOsmResult train_osm(const AttentionParamsd& init, const std::vector<OsmExample>& dataset,
                         const EncoderHandle& encoder, LlmBackend& llm, const TrainOsmConfig& config);

/// Fraction of `draws` selections per example that pick candidate 0.
double identity_selection_frequency(const std::vector<OsmExample>& dataset, const AttentionParamsd& params,
                                    const EncoderHandle& encoder, std::size_t m, double tau, std::size_t draws,
                                    std::uint64_t seed, SerializationKind kind = SerializationKind::FeatureEdge);

}  // namespace graphsos
