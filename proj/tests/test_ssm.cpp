#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "graphsos/errors.hpp"
#include "graphsos/ssm.hpp"
#include "test_support.hpp"

using namespace graphsos;

namespace {

TextGraph star(int leaves, bool with_text = false) {
  std::vector<NodeRecord> nodes;
  std::vector<Edge> edges;
  for (int i = 0; i <= leaves; ++i) {
    nodes.push_back({i, with_text ? std::optional<std::string>("same words") : std::nullopt, "a"});
    if (i > 0) edges.push_back({0, i});
  }
  return TextGraph(std::move(nodes), std::move(edges));
}

class ConstantOracle : public ScoringOracle {
 public:
  explicit ConstantOracle(double p1) : p1_(p1) {}
  ScoreResult score(const SerializedGraph&) override { return {p1_, std::nullopt, std::nullopt}; }

 private:
  double p1_;
};

// Sum of step log-probabilities recomputed from scratch for the fixed choices in `trace`.
double trace_log_prob(const SampleTrace& trace, const TextGraph& graph, const AttentionParamsd& p,
                      const Eigen::MatrixXd& emb) {
  Eigen::MatrixXd keys(static_cast<Eigen::Index>(trace.neighborhood.size()), emb.cols());
  for (std::size_t i = 0; i < trace.neighborhood.size(); ++i)
    keys.row(static_cast<Eigen::Index>(i)) = emb.row(static_cast<Eigen::Index>(graph.index_of(trace.neighborhood[i])));
  const Eigen::VectorXd t = emb.row(static_cast<Eigen::Index>(graph.index_of(trace.target))).transpose();
  const Eigen::VectorXd w = multihead_weights(p, t, keys);
  double total = 0.0;
  for (const auto& s : trace.steps) {
    double z = 0.0;
    for (auto c : s.candidates) z += w(static_cast<Eigen::Index>(c));
    total += std::log(w(static_cast<Eigen::Index>(s.weight_index)) / z);
  }
  return total;
}

}  // namespace

TEST_CASE("n_max = 1 keeps only the target") {
  const auto g = star(4);
  const auto p = AttentionParamsd::random(2, 8, 1);
  const auto trace = sample_subgraph(g, 0, p, EncoderHandle::builtin(8), SampleConfig{1, 2, true, 0});
  CHECK(trace.visited == std::vector<NodeId>{0});
  CHECK(trace.subgraph.node_count() == 1);
}

TEST_CASE("sharp attention picks the matching neighbor first") {
  const auto g = star(5);
  std::map<std::string, EmbeddingVector> rows;
  for (int i = 0; i <= 5; ++i) rows[std::to_string(i)] = Eigen::VectorXd::Unit(6, i);
  rows["3"] = Eigen::VectorXd::Unit(6, 0);  // neighbor 3 mirrors the center
  const auto enc = EncoderHandle::table(rows, 6);
  auto p = AttentionParamsd::zeros(1, 6);
  p.query[0] = 10.0 * Eigen::MatrixXd::Identity(6, 6);
  p.key[0] = 10.0 * Eigen::MatrixXd::Identity(6, 6);
  const auto emb = embed_nodes(enc, g);

  const auto probe = sample_subgraph(g, 0, p, emb, SampleConfig{2, 2, true, 0});
  CHECK(probe.attention(2) > 0.99);  // neighbor 3 sits at slot 2
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto trace = sample_subgraph(g, 0, p, emb, SampleConfig{3, 2, true, seed});
    REQUIRE(trace.visited.size() >= 2);
    CHECK(trace.visited[1] == 3);
  }
}

TEST_CASE("identical neighbors are chosen uniformly") {
  const auto g = star(5, true);
  const auto p = AttentionParamsd::random(4, 16, 2);
  const auto emb = embed_nodes(EncoderHandle::builtin(16), g);
  std::map<NodeId, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto trace = sample_subgraph(g, 0, p, emb, SampleConfig{2, 2, true, static_cast<std::uint64_t>(i)});
    ++counts[trace.visited.at(1)];
  }
  for (NodeId leaf = 1; leaf <= 5; ++leaf) CHECK(std::abs(counts[leaf] / double(draws) - 0.2) <= 0.01);
}

TEST_CASE("walk invariants on planted graphs") {
  const auto g = synth_planted_graph(60, 3, 0.4, 5);
  const auto p = AttentionParamsd::random(4, 32, 9);
  const auto emb = embed_nodes(EncoderHandle::builtin(32), g);
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const NodeId v = static_cast<NodeId>(rng.below(60));
    const int n_max = 1 + static_cast<int>(rng.below(25));
    const int k = 1 + static_cast<int>(rng.below(3));
    const auto trace = sample_subgraph(g, v, p, emb, SampleConfig{n_max, k, rng.below(2) == 0, rng.next()});
    CHECK(trace.visited.size() <= static_cast<std::size_t>(n_max));
    CHECK(trace.visited.front() == v);
    CHECK(trace.subgraph.contains(v));
    const auto hood = k_hop_neighborhood(g, v, k);
    for (std::size_t i = 1; i < trace.visited.size(); ++i)
      CHECK(std::binary_search(hood.begin(), hood.end(), trace.visited[i]));
    std::set<NodeId> unique(trace.visited.begin(), trace.visited.end());
    CHECK(unique.size() == trace.visited.size());
  }
}

TEST_CASE("restart reaches the whole neighborhood of a path") {
  TextGraph path({{0, {}, "a"}, {1, {}, "a"}, {2, {}, "a"}, {3, {}, "a"}, {4, {}, "a"}},
                 {{0, 1}, {0, 2}, {1, 3}, {2, 4}});
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(5, 4);
  for (int i = 0; i < 4; ++i) e(i + 1, i) = 1.0;
  const auto p = AttentionParamsd::random(2, 4, 3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto trace = sample_subgraph(path, 0, p, e, SampleConfig{5, 2, true, seed});
    CHECK(trace.visited.size() == 5);
    CHECK_FALSE(trace.exhausted);
    const auto once = sample_subgraph(path, 0, p, e, SampleConfig{5, 2, false, seed});
    CHECK(once.visited.size() == 3);
    CHECK(once.exhausted);
  }
}

TEST_CASE("trace log-probability gradient matches finite differences") {
  const auto g = synth_planted_graph(40, 2, 0.5, 3);
  const auto emb = embed_nodes(EncoderHandle::builtin(8), g);
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = AttentionParamsd::random(2, 8, rng);
    const auto trace = sample_subgraph(g, static_cast<NodeId>(rng.below(40)), p, emb, SampleConfig{6, 2, true, rng.next()});
    if (trace.steps.empty()) continue;
    const auto grad = trace_log_prob_grad(trace, g, p, emb);
    const double eps = 1e-5;
    for (std::size_t h = 0; h < 2; ++h)
      for (int which = 0; which < 2; ++which)
        for (Eigen::Index r = 0; r < 8; ++r)
          for (Eigen::Index c = 0; c < 4; ++c) {
            auto plus = p, minus = p;
            (which ? plus.key[h] : plus.query[h])(r, c) += eps;
            (which ? minus.key[h] : minus.query[h])(r, c) -= eps;
            const double numeric =
                (trace_log_prob(trace, g, plus, emb) - trace_log_prob(trace, g, minus, emb)) / (2 * eps);
            const double analytic = (which ? grad.key[h] : grad.query[h])(r, c);
            CHECK(std::abs(numeric - analytic) <= 1e-6 + 1e-4 * std::abs(numeric));
          }
  }
}

TEST_CASE("scores and losses") {
  CHECK(score_from_logits(0.0, 0.0).p1 == 0.5);
  CHECK(std::abs(score_from_logits(0.0, std::log(3.0)).p1 - 0.75) < 1e-12);
  CHECK(ssm_loss(1.0, 5.0) == 0.0);
  CHECK(std::abs(ssm_loss(0.0, 5.0) - 0.2) < 1e-12);
  CHECK(std::abs(ssm_loss(0.5, 5.0) - 0.05) < 1e-12);
  CHECK_THROWS_AS(ssm_loss(1.5, 5.0), Error);
  CHECK_THROWS_AS(ssm_loss(0.5, 0.0), Error);

  const auto tri = TextGraph({{0, "x", "a"}, {1, "y", "a"}, {2, "z", "a"}}, {{0, 1}, {1, 2}});
  HomophilyOracle oracle(tri.labels());
  CHECK(std::abs(score_subgraph(render_subgraph(tri), oracle).p1 - 0.99) < 1e-12);
  const auto mixed = TextGraph({{0, "x", "a"}, {1, "y", "b"}}, {{0, 1}});
  HomophilyOracle mixed_oracle(mixed.labels());
  CHECK(std::abs(score_subgraph(render_subgraph(mixed), mixed_oracle).p1 - 0.01) < 1e-12);
  CHECK(score_subgraph(render_subgraph(induced_subgraph(tri, {0})), oracle).p1 == 0.5);
  CHECK_THROWS_AS(make_scoring_oracle("builtin", {}), LookupError);
  CHECK_THROWS_AS(make_scoring_oracle("magic", tri.labels()), FormatError);
}

TEST_CASE("scoring examples") {
  SUBCASE("single label yields no negatives") {
    const auto g = star(6);
    ScoringExampleConfig cfg;
    cfg.count = 5;
    const auto ex = build_scoring_examples({g}, cfg);
    CHECK(ex.negatives == 0);
    CHECK(ex.positives == 5);
    CHECK_FALSE(ex.warnings.empty());
  }
  SUBCASE("planted graph gives both polarities") {
    const auto g = synth_planted_graph(100, 2, 0.5, 1);
    ScoringExampleConfig cfg;
    cfg.count = 50;
    cfg.seed = 2;
    const auto ex = build_scoring_examples({g}, cfg);
    CHECK(ex.positives == 50);
    CHECK(ex.negatives == 50);
    const auto labels = g.labels();
    for (const auto& e : ex.examples) {
      const auto sub = parse(e.serialized.text, e.serialized.kind);
      const double h = edge_homophily(sub, labels);
      if (e.label == 1) CHECK(h >= 0.8);
      else CHECK(h <= 0.2);
      CHECK(sub.node_count() >= 3);
    }
    const auto again = build_scoring_examples({g}, cfg);
    REQUIRE(again.examples.size() == ex.examples.size());
    for (std::size_t i = 0; i < ex.examples.size(); ++i) CHECK(again.examples[i].serialized.text == ex.examples[i].serialized.text);
  }
}

TEST_CASE("training edge cases") {
  const auto g = synth_planted_graph(40, 2, 0.3, 2);
  const auto enc = EncoderHandle::builtin(16);
  const auto init = AttentionParamsd::random(4, 16, 1);
  HomophilyOracle oracle(g.labels());

  TrainSsmConfig cfg;
  cfg.steps = 30;
  cfg.lr = 0.0;
  CHECK(train_ssm(init, {g}, enc, oracle, cfg).params == init);

  ConstantOracle sure(1.0);
  cfg.lr = 0.5;
  const auto flat = train_ssm(init, {g}, enc, sure, cfg);
  CHECK(flat.params == init);
  for (double l : flat.losses) CHECK(l == 0.0);

  cfg.steps = 0;
  CHECK_THROWS_AS(train_ssm(init, {g}, enc, oracle, cfg), TrainingError);

  cfg.steps = 40;
  const auto a = train_ssm(init, {g}, enc, oracle, cfg);
  const auto b = train_ssm(init, {g}, enc, oracle, cfg);
  CHECK(a.params == b.params);
  CHECK(a.losses == b.losses);
  CHECK(a.params.all_finite());
  CHECK_FALSE(a.params == init);
}
