#include "graphsos/ssm.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "graphsos/errors.hpp"
#include "graphsos/rng.hpp"

namespace graphsos {

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& node_embeddings, const TextGraph& graph,
                            const std::vector<NodeId>& ids) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), node_embeddings.cols());
  for (std::size_t i = 0; i < ids.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = node_embeddings.row(static_cast<Eigen::Index>(graph.index_of(ids[i])));
  return out;
}

}  // namespace

SampleTrace sample_subgraph(const TextGraph& graph, NodeId target, const AttentionParamsd& params,
                            const Eigen::MatrixXd& node_embeddings, const SampleConfig& config) {
  if (config.n_max < 1) throw Error("n_max must be at least 1");
  if (config.k < 1) throw Error("hop radius k must be at least 1");
  if (node_embeddings.rows() != static_cast<Eigen::Index>(graph.node_count()))
    throw DimensionError("node embedding rows do not match the graph");

  SampleTrace trace;
  trace.target = target;
  trace.visited.push_back(target);
  trace.neighborhood = k_hop_neighborhood(graph, target, config.k);

  if (trace.neighborhood.empty() || config.n_max == 1) {
    trace.exhausted = config.n_max > 1;
    trace.subgraph = induced_subgraph(graph, trace.visited);
    return trace;
  }

  const Eigen::VectorXd t = node_embeddings.row(static_cast<Eigen::Index>(graph.index_of(target))).transpose();
  const Eigen::MatrixXd keys = gather_rows(node_embeddings, graph, trace.neighborhood);
  trace.attention = multihead_weights(params, t, keys);

  std::unordered_map<NodeId, std::size_t> slot;
  for (std::size_t i = 0; i < trace.neighborhood.size(); ++i) slot.emplace(trace.neighborhood[i], i);
  std::unordered_set<NodeId> visited{target};

  auto candidates_of = [&](NodeId node) {
    std::vector<std::size_t> out;
    for (NodeId u : graph.neighbors(node)) {
      auto it = slot.find(u);
      if (it != slot.end() && !visited.count(u)) out.push_back(it->second);
    }
    return out;
  };

  Rng rng(config.seed);
  NodeId current = target;
  while (trace.visited.size() < static_cast<std::size_t>(config.n_max)) {
    auto cands = candidates_of(current);
    if (cands.empty()) {
      if (!config.restart) {
        trace.exhausted = true;
        break;
      }
      if (current != target) {
        current = target;
        continue;
      }
      auto next = std::find_if(trace.visited.begin(), trace.visited.end(),
                               [&](NodeId n) { return !candidates_of(n).empty(); });
      if (next == trace.visited.end()) {
        trace.exhausted = true;
        break;
      }
      current = *next;
      continue;
    }

    double total = 0.0;
    for (auto c : cands) total += trace.attention[static_cast<Eigen::Index>(c)];
    std::size_t pick = cands.back();
    double weight = 0.0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (auto c : cands) {
        const double w = trace.attention[static_cast<Eigen::Index>(c)];
        if (r < w && w > 0.0) {
          pick = c;
          break;
        }
        r -= w;
      }
      weight = trace.attention[static_cast<Eigen::Index>(pick)];
      if (weight == 0.0) {  // rounding fell past the last positive weight
        for (auto it = cands.rbegin(); it != cands.rend(); ++it)
          if (trace.attention[static_cast<Eigen::Index>(*it)] > 0.0) {
            pick = *it;
            break;
          }
        weight = trace.attention[static_cast<Eigen::Index>(pick)];
      }
    } else {
      // every candidate weight underflowed; fall back to uniform
      pick = cands[static_cast<std::size_t>(rng.below(cands.size()))];
    }

    SampleStep step;
    step.from = current;
    step.chosen = trace.neighborhood[pick];
    step.weight_index = pick;
    step.log_prob = total > 0.0 ? std::log(weight / total) : -std::log(static_cast<double>(cands.size()));
    step.candidates = std::move(cands);
    trace.steps.push_back(std::move(step));

    current = trace.neighborhood[pick];
    visited.insert(current);
    trace.visited.push_back(current);
  }

  trace.subgraph = induced_subgraph(graph, trace.visited);
  return trace;
}

SampleTrace sample_subgraph(const TextGraph& graph, NodeId target, const AttentionParamsd& params,
                            const EncoderHandle& encoder, const SampleConfig& config) {
  return sample_subgraph(graph, target, params, embed_nodes(encoder, graph), config);
}

AttentionParamsd trace_log_prob_grad(const SampleTrace& trace, const TextGraph& graph,
                                     const AttentionParamsd& params, const Eigen::MatrixXd& node_embeddings) {
  if (trace.steps.empty()) return params.zeros_like();
  Eigen::VectorXd upstream = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(trace.neighborhood.size()));
  const auto& w = trace.attention;
  for (const auto& step : trace.steps) {
    double total = 0.0;
    for (auto c : step.candidates) total += w[static_cast<Eigen::Index>(c)];
    const double chosen = w[static_cast<Eigen::Index>(step.weight_index)];
    if (total <= 0.0 || chosen <= 0.0) continue;  // uniform fallback carries no gradient
    // d/dw log(w_chosen / sum_C w) = e_chosen / w_chosen - 1_C / sum_C w
    upstream[static_cast<Eigen::Index>(step.weight_index)] += 1.0 / chosen;
    for (auto c : step.candidates) upstream[static_cast<Eigen::Index>(c)] -= 1.0 / total;
  }
  const Eigen::VectorXd t =
      node_embeddings.row(static_cast<Eigen::Index>(graph.index_of(trace.target))).transpose();
  return multihead_grad(params, t, gather_rows(node_embeddings, graph, trace.neighborhood), upstream);
}

ScoreResult score_from_logits(double logit0, double logit1) {
  ScoreResult r;
  r.logit0 = logit0;
  r.logit1 = logit1;
  const double m = std::max(logit0, logit1);
  const double e0 = std::exp(logit0 - m), e1 = std::exp(logit1 - m);
  r.p1 = e1 / (e0 + e1);
  return r;
}

ScoreResult HomophilyOracle::score(const SerializedGraph& serialized) {
  const TextGraph g = parse(serialized.text, serialized.kind);
  for (const auto& n : g.nodes())
    if (!labels_.count(n.id)) throw LookupError("homophily oracle has no label for node " + std::to_string(n.id));
  if (g.edges().empty()) return score_from_logits(0.0, 0.0);
  const double h = std::clamp(edge_homophily(g, labels_), 0.01, 0.99);
  return score_from_logits(0.0, std::log(h / (1.0 - h)));
}

ScoreResult HttpScoringOracle::score(const SerializedGraph& serialized) {
  auto reply = post_json(url_, {{"text", serialized.text}}, retry_);
  const auto& logits = reply.contains("logits") ? reply["logits"] : nlohmann::json();
  if (!logits.is_array() || logits.size() != 2 || !logits[0].is_number() || !logits[1].is_number())
    throw TransportError("scoring response from " + url_ + " lacks 'logits': [l0, l1]", 1);
  return score_from_logits(logits[0].get<double>(), logits[1].get<double>());
}

std::unique_ptr<ScoringOracle> make_scoring_oracle(std::string_view spec, const LabelAssignment& labels) {
  if (spec == "builtin") {
    if (labels.empty()) throw LookupError("builtin oracle needs labeled graphs");
    return std::make_unique<HomophilyOracle>(labels);
  }
  if (spec.rfind("http:", 0) == 0) return std::make_unique<HttpScoringOracle>(url_from_spec(spec));
  throw FormatError("oracle must be builtin or http:<url>, got '" + std::string(spec) + "'");
}

double ssm_loss(double p1, double temperature) {
  if (!(temperature > 0.0)) throw Error("ssm loss temperature must be positive");
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw Error("score must lie in [0, 1]");
  const double gap = 1.0 - p1;
  return gap * gap / temperature;
}

SerializedGraph render_subgraph(const TextGraph& subgraph) {
  return serialize(subgraph, subgraph.has_text() ? SerializationKind::FeatureEdge : SerializationKind::EdgeOnly);
}

namespace {

// Greedy growth sequence inside `context`; `prefer_same` picks the candidate
// adding the most same-label (or cross-label) edges to the current set.
std::vector<NodeId> grow_greedy(const TextGraph& graph, NodeId target, const std::unordered_set<NodeId>& context,
                                int max_nodes, bool prefer_same, Rng& rng) {
  std::vector<NodeId> order{target};
  std::unordered_set<NodeId> in{target};
  auto label = [&](NodeId id) -> const std::string& { return *graph.node(id).label; };
  while (static_cast<int>(order.size()) < max_nodes) {
    std::vector<std::pair<int, NodeId>> scored;
    std::unordered_set<NodeId> seen;
    for (NodeId s : order) {
      for (NodeId u : graph.neighbors(s)) {
        if (in.count(u) || !context.count(u) || !seen.insert(u).second) continue;
        int same = 0, cross = 0;
        for (NodeId w : graph.neighbors(u)) {
          if (!in.count(w)) continue;
          (label(w) == label(u) ? same : cross) += 1;
        }
        scored.emplace_back(prefer_same ? same - cross : cross - same, u);
      }
    }
    if (scored.empty()) break;
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::size_t ties = 1;
    while (ties < scored.size() && scored[ties].first == scored.front().first) ++ties;
    NodeId pick = scored[static_cast<std::size_t>(rng.below(ties))].second;
    order.push_back(pick);
    in.insert(pick);
  }
  return order;
}

// Largest prefix with at least `min_nodes` nodes, one edge and homophily on
// the requested side of `threshold`.
std::optional<std::pair<TextGraph, double>> best_prefix(const TextGraph& graph, const std::vector<NodeId>& order,
                                                        int min_nodes, bool positive, double threshold,
                                                        const LabelAssignment& labels) {
  for (std::size_t len = order.size(); len >= static_cast<std::size_t>(std::max(min_nodes, 2)); --len) {
    std::vector<NodeId> prefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len));
    TextGraph sub = induced_subgraph(graph, prefix);
    if (sub.edges().empty()) continue;
    const double h = edge_homophily(sub, labels);
    if (positive ? h >= threshold : h <= threshold) return std::make_pair(std::move(sub), h);
  }
  return std::nullopt;
}

}  // namespace

ScoringExamples build_scoring_examples(const std::vector<TextGraph>& graphs, const ScoringExampleConfig& config) {
  std::vector<std::pair<std::size_t, NodeId>> targets;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    if (!graphs[gi].has_labels()) throw LookupError("scoring examples need fully labeled graphs");
    for (const auto& n : graphs[gi].nodes()) targets.emplace_back(gi, n.id);
  }
  Rng rng(config.seed);
  rng.shuffle(targets);

  std::vector<LabelAssignment> labels;
  for (const auto& g : graphs) labels.push_back(g.labels());

  ScoringExamples out;
  for (const auto& [gi, v] : targets) {
    if (out.positives >= config.count && out.negatives >= config.count) break;
    const TextGraph& g = graphs[gi];
    const auto hood = k_hop_neighborhood(g, v, config.k);
    if (hood.empty()) continue;
    std::unordered_set<NodeId> context(hood.begin(), hood.end());
    for (int polarity = 1; polarity >= 0; --polarity) {
      std::size_t& have = polarity ? out.positives : out.negatives;
      if (have >= config.count) continue;
      auto order = grow_greedy(g, v, context, config.max_nodes, polarity == 1, rng);
      auto found = best_prefix(g, order, config.min_nodes, polarity == 1,
                               polarity ? config.positive_threshold : config.negative_threshold, labels[gi]);
      if (!found) continue;
      out.examples.push_back({render_subgraph(found->first), polarity, gi, v, found->second});
      ++have;
    }
  }
  if (out.positives < config.count)
    out.warnings.push_back("only " + std::to_string(out.positives) + " of " + std::to_string(config.count) +
                           " positive examples were feasible");
  if (out.negatives < config.count)
    out.warnings.push_back("only " + std::to_string(out.negatives) + " of " + std::to_string(config.count) +
                           " negative examples were feasible");
  return out;
}

TrainSsmResult train_ssm(const AttentionParamsd& init, const std::vector<TextGraph>& graphs,
                         const EncoderHandle& encoder, ScoringOracle& oracle, const TrainSsmConfig& config) {
  if (config.steps < 1) throw TrainingError("train_ssm needs at least one step");
  if (!(config.lr >= 0.0)) throw TrainingError("learning rate must be non-negative");

  std::vector<Eigen::MatrixXd> embeddings;
  std::vector<std::vector<NodeId>> eligible;
  for (const auto& g : graphs) {
    embeddings.push_back(embed_nodes(encoder, g));
    std::vector<NodeId> ids;
    for (const auto& n : g.nodes())
      if (!g.neighbors(n.id).empty()) ids.push_back(n.id);
    eligible.push_back(std::move(ids));
  }
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < graphs.size(); ++i)
    if (!eligible[i].empty()) usable.push_back(i);
  if (usable.empty()) throw TrainingError("no graph has a node with neighbours");

  TrainSsmResult result{init, {}, {}};
  auto& params = result.params;
  Rng rng(config.seed);
  double baseline = 0.0;
  ParamStepper stepper(config.optimizer, params);
  for (std::size_t step = 0; step < config.steps; ++step) {
    const std::size_t gi = usable[static_cast<std::size_t>(rng.below(usable.size()))];
    const NodeId v = eligible[gi][static_cast<std::size_t>(rng.below(eligible[gi].size()))];
    SampleConfig sc = config.sample;
    sc.seed = rng.next();

    const SampleTrace trace = sample_subgraph(graphs[gi], v, params, embeddings[gi], sc);
    const ScoreResult score = oracle.score(render_subgraph(trace.subgraph));
    const double loss = ssm_loss(score.p1, config.temperature);
    const double reward = -loss;
    if (step == 0) baseline = reward;
    const double advantage = reward - baseline;
    baseline = config.baseline_decay * baseline + (1.0 - config.baseline_decay) * reward;
    result.losses.push_back(loss);
    result.rewards.push_back(reward);

    if (advantage == 0.0 || config.lr == 0.0) continue;
    AttentionParamsd grad = trace_log_prob_grad(trace, graphs[gi], params, embeddings[gi]);
    if (!grad.all_finite())
      throw TrainingError("non-finite gradient at step " + std::to_string(step) + " (target " +
                          std::to_string(v) + ", " + std::to_string(trace.steps.size()) + " walk steps)");
    double scale = advantage;
    const double norm = std::abs(advantage) * std::sqrt(grad.squared_norm());
    if (norm > config.clip_norm) scale *= config.clip_norm / norm;
    grad.scale(scale);
    stepper.step(params, grad, config.lr);
  }
  return result;
}

double mean_same_class_proportion(const TextGraph& graph, const std::vector<NodeId>& targets,
                                  const AttentionParamsd& params, const Eigen::MatrixXd& node_embeddings,
                                  SampleConfig config, std::uint64_t seed) {
  if (targets.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    config.seed = seed + i;
    const auto trace = sample_subgraph(graph, targets[i], params, node_embeddings, config);
    total += same_class_fraction(graph, targets[i], trace.visited);
  }
  return total / static_cast<double>(targets.size());
}

}  // namespace graphsos
