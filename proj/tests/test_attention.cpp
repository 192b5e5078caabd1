#include "doctest.h"

#include <cmath>

#include "graphsos/attention.hpp"
#include "graphsos/errors.hpp"
#include "graphsos/optim.hpp"
#include "test_support.hpp"

using namespace graphsos;

namespace {

// Scalar-loop evaluation of one head, sharing no code with the library.
std::vector<double> oracle_head(const AttentionParamsd& p, int head, const Eigen::VectorXd& t,
                                const Eigen::MatrixXd& n) {
  const auto& wq = p.query[static_cast<std::size_t>(head)];
  const auto& wk = p.key[static_cast<std::size_t>(head)];
  const int dk = p.dim / p.heads;
  std::vector<double> q(static_cast<std::size_t>(dk), 0.0);
  for (int j = 0; j < dk; ++j)
    for (int r = 0; r < p.dim; ++r) q[static_cast<std::size_t>(j)] += wq(r, j) * t(r);
  std::vector<double> logits;
  for (Eigen::Index i = 0; i < n.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < dk; ++j) {
      double kij = 0.0;
      for (int r = 0; r < p.dim; ++r) kij += n(i, r) * wk(r, j);
      s += kij * q[static_cast<std::size_t>(j)];
    }
    logits.push_back(s / std::sqrt(static_cast<double>(dk)));
  }
  double mx = logits[0];
  for (double l : logits) mx = std::max(mx, l);
  double z = 0.0;
  for (double& l : logits) z += (l = std::exp(l - mx));
  for (double& l : logits) l /= z;
  return logits;
}

double objective(const AttentionParamsd& p, const Eigen::VectorXd& t, const Eigen::MatrixXd& n,
                 const Eigen::VectorXd& u) {
  double total = 0.0;
  for (int h = 0; h < p.heads; ++h) {
    const auto w = oracle_head(p, h, t, n);
    for (std::size_t i = 0; i < w.size(); ++i) total += u(static_cast<Eigen::Index>(i)) * w[i] / p.heads;
  }
  return total;
}

Eigen::VectorXd random_vec(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

Eigen::MatrixXd random_mat(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

// Largest relative error of the analytic gradient against central differences.
double gradient_error(const AttentionParamsd& p, const Eigen::VectorXd& t, const Eigen::MatrixXd& n,
                      const Eigen::VectorXd& u) {
  const auto g = multihead_grad(p, t, n, u);
  const double eps = 1e-5;
  double worst = 0.0;
  auto check = [&](bool key, std::size_t h) {
    const auto& analytic = key ? g.key[h] : g.query[h];
    for (Eigen::Index r = 0; r < analytic.rows(); ++r)
      for (Eigen::Index c = 0; c < analytic.cols(); ++c) {
        auto plus = p, minus = p;
        (key ? plus.key[h] : plus.query[h])(r, c) += eps;
        (key ? minus.key[h] : minus.query[h])(r, c) -= eps;
        const double numeric = (objective(plus, t, n, u) - objective(minus, t, n, u)) / (2 * eps);
        const double denom = std::max({std::abs(numeric), std::abs(analytic(r, c)), 1e-6});
        worst = std::max(worst, std::abs(numeric - analytic(r, c)) / denom);
      }
  };
  for (std::size_t h = 0; h < static_cast<std::size_t>(p.heads); ++h) {
    check(false, h);
    check(true, h);
  }
  return worst;
}

}  // namespace

TEST_CASE("scaled dot-product weights") {
  Eigen::VectorXd q(1);
  q << 2.0;
  Eigen::MatrixXd keys(2, 1);
  keys << 1.0, 0.0;
  const auto w = sdp_weights(q, keys, 1);
  CHECK(w(0) == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(w(1) == doctest::Approx(0.1192).epsilon(1e-4));
  CHECK(w(0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));

  CHECK(sdp_weights(q, Eigen::MatrixXd::Ones(1, 1), 1)(0) == 1.0);
  const auto uniform = sdp_weights(q, Eigen::MatrixXd::Constant(5, 1, 0.3), 1);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(uniform(i) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(sdp_weights(q, Eigen::MatrixXd(0, 1), 1), DimensionError);
  CHECK_THROWS_AS(sdp_weights(q, Eigen::MatrixXd::Ones(2, 3), 1), DimensionError);
}

TEST_CASE("multihead weights") {
  SUBCASE("single head with identity projections reduces to sdp") {
    auto p = AttentionParamsd::zeros(1, 3);
    p.query[0] = Eigen::MatrixXd::Identity(3, 3);
    p.key[0] = Eigen::MatrixXd::Identity(3, 3);
    Rng rng(1);
    const auto t = random_vec(rng, 3);
    const auto n = random_mat(rng, 4, 3);
    CHECK((multihead_weights(p, t, n) - sdp_weights(t, n, 3)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("identical neighbors give uniform weights") {
    const auto p = AttentionParamsd::random(2, 4, 3);
    Eigen::MatrixXd n = Eigen::RowVector4d(0.5, -1, 2, 0).replicate(3, 1);
    const auto w = multihead_weights(p, Eigen::Vector4d(1, 2, 3, 4), n);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(w(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("mean of independently computed heads") {
    const auto p = AttentionParamsd::random(2, 6, 11);
    Rng rng(11);
    const auto t = random_vec(rng, 6);
    const auto n = random_mat(rng, 3, 6);
    const auto w = multihead_weights(p, t, n);
    const auto h0 = oracle_head(p, 0, t, n), h1 = oracle_head(p, 1, t, n);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(w(static_cast<Eigen::Index>(i)) - (h0[i] + h1[i]) / 2) < 1e-12);
  }
  SUBCASE("weights are distributions") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const int heads = 1 + static_cast<int>(rng.below(4));
      const int dim = heads * (1 + static_cast<int>(rng.below(4)));
      const auto p = AttentionParamsd::random(heads, dim, rng);
      const auto w = multihead_weights(p, random_vec(rng, dim), random_mat(rng, 1 + static_cast<Eigen::Index>(rng.below(6)), dim));
      CHECK(w.minCoeff() >= 0.0);
      CHECK(std::abs(w.sum() - 1.0) < 1e-9);
    }
  }
  CHECK_THROWS_AS(AttentionParamsd::zeros(3, 8), DimensionError);
}

TEST_CASE("multihead gradient") {
  SUBCASE("zero upstream gives zero gradient") {
    const auto p = AttentionParamsd::random(2, 4, 1);
    const auto g = multihead_grad(p, Eigen::Vector4d(1, 0, 0, 1), Eigen::MatrixXd::Random(3, 4), Eigen::Vector3d::Zero());
    CHECK(g.squared_norm() == 0.0);
  }
  SUBCASE("finite differences, seed 5") {
    Rng rng(5);
    const auto p = AttentionParamsd::random(2, 8, rng);
    const auto t = random_vec(rng, 8);
    const auto n = random_mat(rng, 4, 8);
    const auto u = random_vec(rng, 4);
    CHECK(gradient_error(p, t, n, u) < 1e-4);
  }
  SUBCASE("identical neighbors pin the weights") {
    Rng rng(6);
    const auto p = AttentionParamsd::random(2, 4, rng);
    Eigen::MatrixXd n = random_vec(rng, 4).transpose().replicate(3, 1);
    const Eigen::VectorXd t = random_vec(rng, 4);
    auto moved = p;
    moved.key[0] += random_mat(rng, 4, 2);
    moved.key[1] += random_mat(rng, 4, 2);
    const auto w = multihead_weights(moved, t, n);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(w(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    const auto g = multihead_grad(p, t, n, random_vec(rng, 3));
    CHECK(g.key[0].norm() < 1e-14);
    CHECK(g.key[1].norm() < 1e-14);
  }
}

TEST_CASE("checkpoint text round trips exactly") {
  const auto p = AttentionParamsd::random(4, 8, 42);
  CHECK(parse_attention_params(dump_attention_params(p)) == p);
  const auto dir = test::scratch_dir("attention");
  save_attention_params(dir / "p.ckpt", p);
  CHECK(load_attention_params(dir / "p.ckpt") == p);
  CHECK_THROWS_AS(parse_attention_params("attn 2 4\n1 2\n"), FormatError);
  CHECK_THROWS_AS(load_attention_params(dir / "none.ckpt"), FormatError);
}

TEST_CASE("templated on scalar") {
  AttentionParams<float> p = AttentionParams<float>::random(1, 2, 3);
  Eigen::Vector2f t(1.0f, 0.5f);
  Eigen::MatrixXf n(2, 2);
  n << 1, 0, 0, 1;
  const Eigen::VectorXf w = multihead_weights(p, t, n);
  CHECK(w.sum() == doctest::Approx(1.0f));
}

TEST_CASE("parameter steppers") {
  const auto p0 = AttentionParamsd::random(2, 4, 3);
  auto dir = AttentionParamsd::zeros(2, 4);
  dir.query[0](1, 0) = 0.004;
  dir.key[1](3, 1) = -250.0;

  auto sgd = p0;
  ParamStepper plain(Optimizer::Sgd, p0);
  plain.step(sgd, dir, 0.5);
  auto expected = p0;
  expected.axpy(0.5, dir);
  CHECK(sgd == expected);

  // The first Adam step moves every nonzero entry by lr regardless of scale.
  auto adam = p0;
  ParamStepper stepper(Optimizer::Adam, p0);
  stepper.step(adam, dir, 0.1);
  CHECK(std::abs(adam.query[0](1, 0) - p0.query[0](1, 0) - 0.1) < 1e-6);
  CHECK(std::abs(adam.key[1](3, 1) - p0.key[1](3, 1) + 0.1) < 1e-6);
  CHECK(adam.query[1] == p0.query[1]);

  CHECK(parse_optimizer("sgd") == Optimizer::Sgd);
  CHECK(std::string(to_string(Optimizer::Adam)) == "adam");
  CHECK_THROWS_AS(parse_optimizer("rmsprop"), FormatError);
}
