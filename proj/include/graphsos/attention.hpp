#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "graphsos/errors.hpp"
#include "graphsos/rng.hpp"

namespace graphsos {

/// Per-head query/key projections for multi-head cross-attention. Each
/// projection maps a d-dimensional embedding onto d/h dimensions; values are
/// never projected because only the weights are consumed downstream.
///
/// Gradients share this layout, so the same type doubles as a gradient buffer.
template <typename Scalar>
struct AttentionParams {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  int heads = 0;
  int dim = 0;
  std::vector<Matrix> query;  // heads x (dim x head_dim)
  std::vector<Matrix> key;

  int head_dim() const { return dim / heads; }

  static AttentionParams zeros(int heads, int dim) {
    if (heads < 1 || dim < 1 || dim % heads != 0)
      throw DimensionError("attention dimension " + std::to_string(dim) +
                           " is not divisible by " + std::to_string(heads) + " heads");
    AttentionParams p;
    p.heads = heads;
    p.dim = dim;
    p.query.assign(static_cast<std::size_t>(heads), Matrix::Zero(dim, dim / heads));
    p.key.assign(static_cast<std::size_t>(heads), Matrix::Zero(dim, dim / heads));
    return p;
  }

  /// Entries i.i.d. uniform on [-1/sqrt(d), 1/sqrt(d)].
  static AttentionParams random(int heads, int dim, Rng& rng) {
    AttentionParams p = zeros(heads, dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    auto fill = [&](Matrix& m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = static_cast<Scalar>(rng.uniform(-bound, bound));
    };
    for (auto& m : p.query) fill(m);
    for (auto& m : p.key) fill(m);
    return p;
  }

  static AttentionParams random(int heads, int dim, std::uint64_t seed) {
    Rng rng(seed);
    return random(heads, dim, rng);
  }

  AttentionParams zeros_like() const { return zeros(heads, dim); }

  /// this += scale * other
  void axpy(Scalar scale, const AttentionParams& other) {
    for (std::size_t i = 0; i < query.size(); ++i) {
      query[i] += scale * other.query[i];
      key[i] += scale * other.key[i];
    }
  }

  void scale(Scalar factor) {
    for (std::size_t i = 0; i < query.size(); ++i) {
      query[i] *= factor;
      key[i] *= factor;
    }
  }

  Scalar squared_norm() const {
    Scalar s = 0;
    for (std::size_t i = 0; i < query.size(); ++i) s += query[i].squaredNorm() + key[i].squaredNorm();
    return s;
  }

  bool all_finite() const {
    for (std::size_t i = 0; i < query.size(); ++i)
      if (!query[i].allFinite() || !key[i].allFinite()) return false;
    return true;
  }

  bool operator==(const AttentionParams& o) const {
    if (heads != o.heads || dim != o.dim) return false;
    for (std::size_t i = 0; i < query.size(); ++i)
      if (query[i] != o.query[i] || key[i] != o.key[i]) return false;
    return true;
  }
};

using AttentionParamsd = AttentionParams<double>;

/// Numerically stable softmax.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Vec = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  Vec e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

/// softmax(keys * q / sqrt(d_k)); `keys` holds one key per row.
template <typename DerivedQ, typename DerivedK>
Eigen::Matrix<typename DerivedQ::Scalar, Eigen::Dynamic, 1> sdp_weights(const Eigen::MatrixBase<DerivedQ>& q,
                                                                        const Eigen::MatrixBase<DerivedK>& keys,
                                                                        int d_k) {
  if (keys.rows() == 0) throw DimensionError("attention needs at least one key");
  if (keys.cols() != q.size())
    throw DimensionError("query has dimension " + std::to_string(q.size()) + " but keys have " +
                         std::to_string(keys.cols()));
  using Scalar = typename DerivedQ::Scalar;
  return softmax((keys * q) / std::sqrt(static_cast<Scalar>(d_k)));
}

namespace detail {

template <typename Scalar, typename DerivedT, typename DerivedN>
void check_shapes(const AttentionParams<Scalar>& params, const Eigen::MatrixBase<DerivedT>& target,
                  const Eigen::MatrixBase<DerivedN>& neighbors) {
  if (neighbors.rows() == 0) throw DimensionError("attention needs at least one neighbor");
  if (target.size() != params.dim || neighbors.cols() != params.dim)
    throw DimensionError("embedding dimension does not match attention dimension " +
                         std::to_string(params.dim));
}

}  // namespace detail

/// Weights of head i: the target projected through W_q[i] queries the
/// neighbors projected through W_k[i].
template <typename Scalar, typename DerivedT, typename DerivedN>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> head_weights(const AttentionParams<Scalar>& params, int head,
                                                      const Eigen::MatrixBase<DerivedT>& target,
                                                      const Eigen::MatrixBase<DerivedN>& neighbors) {
  detail::check_shapes(params, target, neighbors);
  const auto h = static_cast<std::size_t>(head);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> q = params.query[h].transpose() * target;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> k = neighbors * params.key[h];
  return sdp_weights(q, k, params.head_dim());
}

/// Mean of the per-head attention distributions.
template <typename Scalar, typename DerivedT, typename DerivedN>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> multihead_weights(const AttentionParams<Scalar>& params,
                                                           const Eigen::MatrixBase<DerivedT>& target,
                                                           const Eigen::MatrixBase<DerivedN>& neighbors) {
  detail::check_shapes(params, target, neighbors);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(neighbors.rows());
  for (int i = 0; i < params.heads; ++i) out += head_weights(params, i, target, neighbors);
  return out / static_cast<Scalar>(params.heads);
}

/// Gradient of upstream . multihead_weights(params, target, neighbors) with
/// respect to every W_q[i] and W_k[i].
///
/// Per head, with q = W_q^T t, K = N W_k, s = K q / sqrt(d_k), w = softmax(s):
///   a      = (diag(w) - w w^T) (upstream / h)
///   dW_k   = N^T a q^T / sqrt(d_k)
///   dW_q   = t (K^T a)^T / sqrt(d_k)
template <typename Scalar, typename DerivedT, typename DerivedN, typename DerivedU>
AttentionParams<Scalar> multihead_grad(const AttentionParams<Scalar>& params,
                                       const Eigen::MatrixBase<DerivedT>& target,
                                       const Eigen::MatrixBase<DerivedN>& neighbors,
                                       const Eigen::MatrixBase<DerivedU>& upstream) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::check_shapes(params, target, neighbors);
  if (upstream.size() != neighbors.rows()) throw DimensionError("upstream gradient length mismatch");

  AttentionParams<Scalar> grad = params.zeros_like();
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(params.head_dim()));
  const Vec g = upstream / static_cast<Scalar>(params.heads);
  for (int i = 0; i < params.heads; ++i) {
    const auto h = static_cast<std::size_t>(i);
    const Vec q = params.query[h].transpose() * target;
    const Mat k = neighbors * params.key[h];
    const Vec w = softmax((k * q) * scale);
    const Vec a = w.cwiseProduct(g) - w * w.dot(g);
    grad.key[h] = scale * (neighbors.transpose() * a) * q.transpose();
    grad.query[h] = scale * target * (k.transpose() * a).transpose();
  }
  return grad;
}

/// Checkpoint text: `attn <h> <d>` then every matrix row-major, one row per
/// line, in the order W_q[0..h-1], W_k[0..h-1].
void save_attention_params(const std::filesystem::path& path, const AttentionParamsd& params);
AttentionParamsd load_attention_params(const std::filesystem::path& path);
std::string dump_attention_params(const AttentionParamsd& params);
AttentionParamsd parse_attention_params(const std::string& text);

}  // namespace graphsos
