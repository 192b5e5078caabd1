#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphsos/attention.hpp"
#include "graphsos/backend.hpp"
#include "graphsos/encoder.hpp"
#include "graphsos/graph.hpp"
#include "graphsos/optim.hpp"
#include "graphsos/serialization.hpp"

namespace graphsos {

struct SampleConfig {
  int n_max = 20;
  int k = 2;
  bool restart = true;
  std::uint64_t seed = 0;
};

struct SampleStep {
  NodeId from = 0;
  NodeId chosen = 0;
  /// Index of `chosen` in SampleTrace::neighborhood / attention.
  std::size_t weight_index = 0;
  double log_prob = 0.0;
  /// Attention indices the step renormalized over (includes weight_index).
  std::vector<std::size_t> candidates;
};

struct SampleTrace {
  NodeId target = 0;
  TextGraph subgraph;
  /// Nodes in visit order; visited.front() == target.
  std::vector<NodeId> visited;
  /// k-hop neighbours of the target, ascending; indexes `attention`.
  std::vector<NodeId> neighborhood;
  Eigen::VectorXd attention;
  std::vector<SampleStep> steps;
  /// Stopped below n_max because no unvisited candidate remained.
  bool exhausted = false;
};

/// Attention-guided random walk around `target`.
///
/// The multi-head weights of the target against its k-hop neighbours are
/// computed once. From the current node the walk moves to an unvisited
/// neighbour inside that neighbourhood with probability proportional to its
/// weight, renormalized over the candidates. A stuck walk restarts at the
/// target (when `restart` is set); a stuck target hands over to the earliest
/// visited node that still has candidates. The result is induced on the
/// visited nodes.
///
/// `node_embeddings` rows follow graph.nodes().
SampleTrace sample_subgraph(const TextGraph& graph, NodeId target, const AttentionParamsd& params,
                            const Eigen::MatrixXd& node_embeddings, const SampleConfig& config);

SampleTrace sample_subgraph(const TextGraph& graph, NodeId target, const AttentionParamsd& params,
                            const EncoderHandle& encoder, const SampleConfig& config);

/// Gradient of sum_steps log P(chosen | from) with respect to the attention
/// projections.
AttentionParamsd trace_log_prob_grad(const SampleTrace& trace, const TextGraph& graph,
                                     const AttentionParamsd& params, const Eigen::MatrixXd& node_embeddings);

struct ScoreResult {
  double p1 = 0.0;
  std::optional<double> logit0;
  std::optional<double> logit1;
};

/// p1 = e^l1 / (e^l0 + e^l1).
ScoreResult score_from_logits(double logit0, double logit1);

class ScoringOracle {
 public:
  virtual ~ScoringOracle() = default;
  virtual ScoreResult score(const SerializedGraph& serialized) = 0;
};

/// Scores a rendered subgraph by its edge homophily under known labels, mapped
/// to logits (0, logit(h)) with h clamped to [0.01, 0.99]. An edgeless
/// subgraph scores logits (0, 0).
class HomophilyOracle : public ScoringOracle {
 public:
  explicit HomophilyOracle(LabelAssignment labels) : labels_(std::move(labels)) {}
  ScoreResult score(const SerializedGraph& serialized) override;

 private:
  LabelAssignment labels_;
};

/// POSTs {"text": ...} and expects {"logits": [l0, l1]}.
class HttpScoringOracle : public ScoringOracle {
 public:
  explicit HttpScoringOracle(std::string url, RetryPolicy retry = {}) : url_(std::move(url)), retry_(retry) {}
  ScoreResult score(const SerializedGraph& serialized) override;

 private:
  std::string url_;
  RetryPolicy retry_;
};

/// `builtin` (needs labels) or `http:<url>`.
std::unique_ptr<ScoringOracle> make_scoring_oracle(std::string_view spec, const LabelAssignment& labels);

inline ScoreResult score_subgraph(const SerializedGraph& serialized, ScoringOracle& oracle) {
  return oracle.score(serialized);
}

/// (1 - p1)^2 / T
double ssm_loss(double p1, double temperature);

/// Rendering used for sampled subgraphs: feature+edge when nodes carry text,
/// edge-only otherwise.
SerializedGraph render_subgraph(const TextGraph& subgraph);

struct ScoringExample {
  SerializedGraph serialized;
  int label = 0;  // 1 = strongly homophilous, 0 = strongly heterophilous
  std::size_t graph_index = 0;
  NodeId target = 0;
  double homophily = 0.0;
};

struct ScoringExampleConfig {
  std::size_t count = 500;
  std::uint64_t seed = 0;
  int k = 2;
  /// Greedy growth stops at this many nodes.
  int max_nodes = 8;
  /// Smallest accepted subgraph.
  int min_nodes = 3;
  double positive_threshold = 0.8;
  double negative_threshold = 0.2;
};

struct ScoringExamples {
  std::vector<ScoringExample> examples;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  /// Human-readable shortfall notes; empty when both polarities reached `count`.
  std::vector<std::string> warnings;
};

/// Up to `count` positive and `count` negative subgraphs, each grown greedily
/// inside a target's k-hop context preferring same-label (positive) or
/// cross-label (negative) additions. The largest grown prefix meeting the
/// threshold is kept; targets where no prefix qualifies are skipped.
ScoringExamples build_scoring_examples(const std::vector<TextGraph>& graphs, const ScoringExampleConfig& config);

struct TrainSsmConfig {
  SampleConfig sample;
  std::size_t steps = 500;
  double lr = 0.05;
  double temperature = 5.0;
  double baseline_decay = 0.9;
  double clip_norm = 1.0;
  Optimizer optimizer = Optimizer::Adam;
  std::uint64_t seed = 0;
};

struct TrainSsmResult {
  AttentionParamsd params;
  std::vector<double> losses;
  std::vector<double> rewards;
};

/// REINFORCE with an exponential-moving-average baseline on R = -ssm_loss.
/// Each step samples a random target from a random graph. Throws
/// TrainingError on a non-finite gradient.
TrainSsmResult train_ssm(const AttentionParamsd& init, const std::vector<TextGraph>& graphs,
                         const EncoderHandle& encoder, ScoringOracle& oracle, const TrainSsmConfig& config);

/// Mean same-class fraction of sampled subgraphs; target i uses seed `seed + i`.
double mean_same_class_proportion(const TextGraph& graph, const std::vector<NodeId>& targets,
                                  const AttentionParamsd& params, const Eigen::MatrixXd& node_embeddings,
                                  SampleConfig config, std::uint64_t seed);

}  // namespace graphsos
