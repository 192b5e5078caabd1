#include "graphsos/osm.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "graphsos/errors.hpp"
#include "graphsos/parallel.hpp"
#include "graphsos/prompt.hpp"

namespace graphsos {

namespace {

// log of an attention weight; weights that underflowed to zero map to the
// smallest finite log so the Gumbel input stays finite.
double safe_log(double w) { return std::log(std::max(w, std::numeric_limits<double>::min())); }

Eigen::MatrixXd embed_candidates(const OrderCandidateSet& set, const EncoderHandle& encoder) {
  Eigen::MatrixXd keys(static_cast<Eigen::Index>(set.candidates.size()), encoder.dim());
  for (std::size_t i = 0; i < set.candidates.size(); ++i)
    keys.row(static_cast<Eigen::Index>(i)) = encoder.embed(set.candidates[i].text).transpose();
  return keys;
}

}  // namespace

GumbelMask gumbel_softmax_with_noise(const Eigen::VectorXd& logits, const Eigen::VectorXd& noise, double tau) {
  if (!(tau > 0.0)) throw Error("gumbel-softmax temperature must be positive");
  if (logits.size() < 1) throw DimensionError("gumbel-softmax needs at least one logit");
  if (noise.size() != logits.size()) throw DimensionError("gumbel noise length mismatch");
  if (!logits.allFinite()) throw Error("gumbel-softmax logits must be finite");

  GumbelMask mask;
  mask.tau = tau;
  mask.noise = noise;
  mask.soft = softmax(((logits + noise) / tau).eval());
  // ties resolve to the lowest index
  for (Eigen::Index i = 1; i < mask.soft.size(); ++i)
    if (mask.soft[i] > mask.soft[static_cast<Eigen::Index>(mask.hard)]) mask.hard = static_cast<std::size_t>(i);
  return mask;
}

GumbelMask gumbel_softmax(const Eigen::VectorXd& logits, double tau, Rng& rng) {
  Eigen::VectorXd noise(logits.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = -std::log(-std::log(rng.uniform_open()));
  return gumbel_softmax_with_noise(logits, noise, tau);
}

OrderCandidateSet build_candidates(const TextGraph& graph, const std::string& question, std::size_t m,
                                   std::uint64_t seed, SerializationKind kind) {
  if (m < 1) throw Error("need at least one order candidate");
  OrderCandidateSet set;
  set.question = question;
  for (const auto& ordering : gen_orderings(graph, m, seed)) set.candidates.push_back(serialize(graph, ordering, kind));
  return set;
}

OrderSelection select_order(const OrderCandidateSet& candidates, const AttentionParamsd& params,
                            const EncoderHandle& encoder, double tau, Rng& rng) {
  if (candidates.candidates.empty()) throw Error("no order candidates");
  const Eigen::VectorXd query = encoder.embed(candidates.question);
  const Eigen::MatrixXd keys = embed_candidates(candidates, encoder);

  OrderSelection sel;
  sel.weights = multihead_weights(params, query, keys);
  const Eigen::VectorXd logits = sel.weights.unaryExpr([](double w) { return safe_log(w); });
  sel.mask = gumbel_softmax(logits, tau, rng);
  sel.index = sel.mask.hard;
  sel.chosen = candidates.candidates[sel.index];
  return sel;
}

TrainOsmResult train_osm(const AttentionParamsd& init, const std::vector<OsmExample>& dataset,
                         const EncoderHandle& encoder, LlmBackend& llm, const TrainOsmConfig& config) {
  if (config.steps < 1) throw TrainingError("train_osm needs at least one step");
  if (dataset.empty()) throw TrainingError("train_osm needs a non-empty dataset");
  if (!(config.lr >= 0.0)) throw TrainingError("learning rate must be non-negative");

  TrainOsmResult result{init, {}, 0};
  auto& params = result.params;
  Rng rng(config.seed);
  double baseline = 0.0;
  bool have_baseline = false;
  ParamStepper stepper(config.optimizer, params);

  auto query_nll = [&](const std::string& prompt, const std::string& target) {
    for (int attempt = 1;; ++attempt) {
      try {
        return llm.nll({prompt, target});
      } catch (const TransportError&) {
        if (attempt >= config.backend_attempts) throw;
      }
    }
  };

  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto& ex = dataset[static_cast<std::size_t>(rng.below(dataset.size()))];
    const auto set = build_candidates(ex.graph, ex.question, config.m, rng.next(), config.kind);
    const Eigen::VectorXd query = encoder.embed(set.question);
    const Eigen::MatrixXd keys = embed_candidates(set, encoder);
    const Eigen::VectorXd weights = multihead_weights(params, query, keys);
    const Eigen::VectorXd logits = weights.unaryExpr([](double w) { return safe_log(w); });
    const GumbelMask mask = gumbel_softmax(logits, config.tau, rng);

    // dL/dsoft: all NLLs under exact expectation, otherwise the chosen one
    // against a moving-average baseline.
    Eigen::VectorXd nll_grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.m));
    double chosen_nll = 0.0;
    try {
      if (config.exact_expectation) {
        std::vector<double> nlls(config.m);
        parallel_for(config.m, config.concurrency, [&](std::size_t i) {
          nlls[i] = query_nll(build_task_prompt(set.candidates[i].text, ex.question), ex.target);
        });
        for (std::size_t i = 0; i < config.m; ++i) nll_grad[static_cast<Eigen::Index>(i)] = nlls[i];
        chosen_nll = nlls[mask.hard];
      } else {
        chosen_nll = query_nll(build_task_prompt(set.candidates[mask.hard].text, ex.question), ex.target);
        if (!have_baseline) baseline = chosen_nll;
        have_baseline = true;
        nll_grad[static_cast<Eigen::Index>(mask.hard)] = chosen_nll - baseline;
        baseline = config.baseline_decay * baseline + (1.0 - config.baseline_decay) * chosen_nll;
      }
    } catch (const TransportError& e) {
      std::cerr << "warning: train_osm step " << step << " skipped: " << e.what() << '\n';
      ++result.skipped_steps;
      continue;
    }
    result.losses.push_back(chosen_nll);
    if (config.lr == 0.0) continue;

    // soft = softmax(z), z = (log w + g) / tau
    const Eigen::VectorXd& soft = mask.soft;
    const Eigen::VectorXd dz = soft.cwiseProduct(nll_grad) - soft * soft.dot(nll_grad);
    const Eigen::VectorXd dw = (dz / config.tau).cwiseQuotient(weights.cwiseMax(std::numeric_limits<double>::min()));
    AttentionParamsd grad = multihead_grad(params, query, keys, dw);
    if (!grad.all_finite()) throw TrainingError("non-finite OSM gradient at step " + std::to_string(step));
    const double norm = std::sqrt(grad.squared_norm());
    double scale = 1.0;
    if (norm > config.clip_norm) scale = config.clip_norm / norm;
    grad.scale(-scale);
    stepper.step(params, grad, config.lr);
  }
  return result;
}

double identity_selection_frequency(const std::vector<OsmExample>& dataset, const AttentionParamsd& params,
                                    const EncoderHandle& encoder, std::size_t m, double tau, std::size_t draws,
                                    std::uint64_t seed, SerializationKind kind) {
  if (dataset.empty() || draws == 0) return 0.0;
  Rng rng(seed);
  std::size_t hits = 0;
  for (const auto& ex : dataset) {
    for (std::size_t d = 0; d < draws; ++d) {
      const auto set = build_candidates(ex.graph, ex.question, m, rng.next(), kind);
      if (select_order(set, params, encoder, tau, rng).index == 0) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size() * draws);
}

}  // namespace graphsos
