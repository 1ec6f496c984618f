#pragma once

// Diffusion processes on affinity graphs. Every routine here is a free
// function templated on the Eigen expression it receives and returns a dense
// matrix of the same scalar type.

#include "dssc/error.hpp"
#include "dssc/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace dssc {

enum class DiffusionVariant { kPower, kAccumulate, kPageRank, kLcdp, kTpg };

enum class Normalization {
  // Symmetric Sinkhorn balancing S W S toward unit row sums, then scaled so
  // the largest row sum is gamma. Symmetric and sub-stochastic.
  kBalanced,
  // D^-1/2 W D^-1/2 scaled so the largest row sum is gamma.
  kSymmetric,
  // gamma * D^-1 W; every non-zero row sums to gamma. Not symmetric.
  kRow,
};

struct DiffusionConfig {
  DiffusionVariant variant = DiffusionVariant::kTpg;
  int steps = 200;
  // Early stop on ||A_{t+1} - A_t||_F / ||A_t||_F.
  double tol = 1e-10;
  double restart_prob = 0.85;  // alpha, weight of the walk step in PageRank
  int knn = 10;
  double substochastic_scale = 0.99;  // gamma
  Normalization normalization = Normalization::kBalanced;

  void validate() const {
    if (steps < 1) throw ParameterError("diffusion: steps must be >= 1");
    if (!(tol > 0.0)) throw ParameterError("diffusion: tol must be positive");
    if (!(substochastic_scale > 0.0 && substochastic_scale < 1.0)) {
      throw ParameterError("diffusion: substochastic_scale must be in (0, 1)");
    }
    if (!(restart_prob > 0.0 && restart_prob < 1.0)) {
      throw ParameterError("diffusion: restart_prob must be in (0, 1)");
    }
    if (knn < 1) throw ParameterError("diffusion: knn must be >= 1");
  }
};

template <typename Scalar>
struct DiffusionResult {
  Matrix<Scalar> affinity;
  int steps_run = 0;
  // Relative Frobenius change of the last update.
  Scalar last_change = 0;
  bool converged = false;
};

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(who) + ": matrix must be square");
  }
}

template <typename A, typename B>
void require_same_size(const Eigen::MatrixBase<A>& a,
                       const Eigen::MatrixBase<B>& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(who) + ": dimension mismatch");
  }
}

template <typename Derived>
void require_nonnegative(const Eigen::MatrixBase<Derived>& m, const char* who) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) < 0) {
        throw PreconditionError(std::string(who) + ": negative entry in row " +
                                    std::to_string(i),
                                i);
      }
}

// Throws naming the first row whose sum is not strictly below one.
template <typename Derived>
void require_substochastic(const Eigen::MatrixBase<Derived>& w,
                           const char* who) {
  using Scalar = typename Derived::Scalar;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const Scalar s = w.row(i).cwiseAbs().sum();
    if (!(s < Scalar(1))) {
      throw PreconditionError(std::string(who) + ": row " + std::to_string(i) +
                                  " sums to " + std::to_string(double(s)) +
                                  ", must be < 1",
                              i);
    }
  }
}

template <typename Scalar>
Scalar relative_change(const Matrix<Scalar>& next, const Matrix<Scalar>& prev) {
  const Scalar base = prev.norm();
  const Scalar diff = (next - prev).norm();
  return base > Scalar(0) ? diff / base : diff;
}

}  // namespace detail

// d_i = sum_k W(i, k).
template <typename Derived>
Vector<typename Derived::Scalar> degrees(const Eigen::MatrixBase<Derived>& w) {
  return w.rowwise().sum();
}

// vol(V) = sum_i d_i.
template <typename Derived>
typename Derived::Scalar volume(const Eigen::MatrixBase<Derived>& w) {
  return w.sum();
}

namespace detail {

// Diagonal x with diag(x) W diag(x) close to unit row sums, by the symmetric
// Sinkhorn-Knopp fixed point x <- sqrt(x / (W x)). Zero-degree nodes keep 0.
template <typename Scalar>
Vector<Scalar> balancing_scale(const Matrix<Scalar>& w, int max_iters = 1000,
                               Scalar tol = Scalar(1e-10)) {
  const auto n = w.rows();
  Vector<Scalar> x(n);
  const Vector<Scalar> d = w.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) x(i) = d(i) > Scalar(0) ? Scalar(1) : Scalar(0);
  for (int it = 0; it < max_iters; ++it) {
    const Vector<Scalar> wx = w * x;
    Scalar worst = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(wx(i) > Scalar(0))) continue;
      worst = std::max(worst, std::abs(x(i) * wx(i) - Scalar(1)));
      x(i) = std::sqrt(x(i) / wx(i));
    }
    if (worst < tol) break;
  }
  return x;
}

}  // namespace detail

// Scales W to a symmetric-or-row sub-stochastic matrix whose largest row sum
// is exactly gamma (< 1). Zero rows stay zero; W = 0 maps to 0.
template <typename Derived>
Matrix<typename Derived::Scalar> normalize_substochastic(
    const Eigen::MatrixBase<Derived>& w, typename Derived::Scalar gamma,
    Normalization mode = Normalization::kBalanced) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(w, "normalize_substochastic");
  if (!(gamma > Scalar(0) && gamma < Scalar(1))) {
    throw ParameterError("normalize_substochastic: gamma must be in (0, 1)");
  }
  detail::require_nonnegative(w, "normalize_substochastic");
  const Matrix<Scalar> wm = w;
  const Vector<Scalar> d = degrees(wm);
  const auto n = wm.rows();

  if (mode == Normalization::kRow) {
    Vector<Scalar> inv(n);
    for (Eigen::Index i = 0; i < n; ++i) inv(i) = d(i) > Scalar(0) ? gamma / d(i) : Scalar(0);
    return inv.asDiagonal() * wm;
  }

  Vector<Scalar> scale(n);
  if (mode == Normalization::kSymmetric) {
    for (Eigen::Index i = 0; i < n; ++i)
      scale(i) = d(i) > Scalar(0) ? Scalar(1) / std::sqrt(d(i)) : Scalar(0);
  } else {
    scale = detail::balancing_scale(wm);
  }
  // s_i s_j commutes, so symmetric input stays bitwise symmetric.
  Matrix<Scalar> m = (scale * scale.transpose()).cwiseProduct(wm);
  // Symmetric scaling bounds the spectral radius, not the row sums.
  const Scalar top = n > 0 ? m.rowwise().sum().maxCoeff() : Scalar(0);
  if (top > Scalar(0)) m *= gamma / top;
  return m;
}

// P = D^-1 W. A row with zero degree becomes a self-loop (P_ii = 1).
template <typename Derived>
Matrix<typename Derived::Scalar> transition_matrix(
    const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(w, "transition_matrix");
  detail::require_nonnegative(w, "transition_matrix");
  Matrix<Scalar> p = w;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const Scalar d = p.row(i).sum();
    if (d > Scalar(0)) {
      p.row(i) /= d;
    } else {
      p.row(i).setZero();
      p(i, i) = Scalar(1);
    }
  }
  return p;
}

// A P^t by repeated right multiplication.
template <typename DerivedA, typename DerivedP>
Matrix<typename DerivedA::Scalar> power_diffuse(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedP>& p,
    int steps) {
  using Scalar = typename DerivedA::Scalar;
  detail::require_square(p, "power_diffuse");
  if (a.cols() != p.rows()) throw DimensionError("power_diffuse: dimension mismatch");
  if (steps < 0) throw ParameterError("power_diffuse: steps must be >= 0");
  Matrix<Scalar> out = a;
  Matrix<Scalar> tmp(out.rows(), out.cols());
  for (int s = 0; s < steps; ++s) {
    tmp.noalias() = out * p;
    out.swap(tmp);
  }
  return out;
}

// Iterates A <- alpha A P + (1 - alpha) Y from `initial` until the relative
// change drops below `tol` or `max_steps` updates have run.
template <typename DerivedA, typename DerivedP, typename DerivedY>
DiffusionResult<typename DerivedP::Scalar> pagerank_diffuse(
    const Eigen::MatrixBase<DerivedA>& initial,
    const Eigen::MatrixBase<DerivedP>& p, typename DerivedP::Scalar alpha,
    const Eigen::MatrixBase<DerivedY>& restart, typename DerivedP::Scalar tol,
    int max_steps) {
  using Scalar = typename DerivedP::Scalar;
  detail::require_square(p, "pagerank_diffuse");
  detail::require_same_size(initial, restart, "pagerank_diffuse");
  if (restart.cols() != p.rows()) {
    throw DimensionError("pagerank_diffuse: dimension mismatch");
  }
  if (!(alpha > Scalar(0) && alpha < Scalar(1))) {
    throw ParameterError("pagerank_diffuse: alpha must be in (0, 1)");
  }
  if (!restart.allFinite()) throw InputError("pagerank_diffuse: Y not finite");
  DiffusionResult<Scalar> res;
  const Matrix<Scalar> jump = (Scalar(1) - alpha) * restart;
  Matrix<Scalar> a = initial;
  Matrix<Scalar> next(a.rows(), a.cols());
  for (int s = 1; s <= max_steps; ++s) {
    next.noalias() = alpha * (a * p);
    next += jump;
    res.last_change = detail::relative_change(next, a);
    a.swap(next);
    res.steps_run = s;
    if (res.last_change < tol) {
      res.converged = true;
      break;
    }
  }
  res.affinity = std::move(a);
  return res;
}

// Keeps the K largest entries of each row (ties to the lower column index),
// then symmetrizes with max(W', W'^T).
template <typename Derived>
Matrix<typename Derived::Scalar> knn_sparsify(const Eigen::MatrixBase<Derived>& w,
                                              int k) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(w, "knn_sparsify");
  const auto n = w.rows();
  if (k < 1 || k >= n) {
    throw ParameterError("knn_sparsify: K must satisfy 1 <= K < N");
  }
  Matrix<Scalar> kept = Matrix<Scalar>::Zero(n, n);
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // A node is not its own neighbour.
    order.erase(order.begin() + i);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return w(i, a) > w(i, b); });
    for (int r = 0; r < k; ++r) kept(i, order[r]) = w(i, order[r]);
    order.resize(n);
  }
  return kept.cwiseMax(kept.transpose());
}

// Applies A <- P A P^T exactly `steps` times.
template <typename DerivedA, typename DerivedP>
Matrix<typename DerivedA::Scalar> lcdp_diffuse(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedP>& p,
    int steps) {
  using Scalar = typename DerivedA::Scalar;
  detail::require_square(a, "lcdp_diffuse");
  detail::require_same_size(a, p, "lcdp_diffuse");
  if (steps < 0) throw ParameterError("lcdp_diffuse: steps must be >= 0");
  Matrix<Scalar> out = a;
  Matrix<Scalar> tmp(out.rows(), out.cols());
  for (int s = 0; s < steps; ++s) {
    tmp.noalias() = p * out;
    out.noalias() = tmp * p.transpose();
  }
  return out;
}

// sum_{i=0..t} W^i. A negative `steps` asks for the limit (I - W)^-1, which
// requires every row sum of |W| to be below one.
template <typename Derived>
Matrix<typename Derived::Scalar> accumulate_diffuse(
    const Eigen::MatrixBase<Derived>& w, int steps) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(w, "accumulate_diffuse");
  const auto n = w.rows();
  const Matrix<Scalar> eye = Matrix<Scalar>::Identity(n, n);
  if (steps < 0) {
    try {
      detail::require_substochastic(w, "accumulate_diffuse");
    } catch (const PreconditionError& e) {
      throw DivergenceError(e.what());
    }
    return (eye - w).partialPivLu().solve(eye);
  }
  Matrix<Scalar> sum = eye;
  Matrix<Scalar> power = eye;
  Matrix<Scalar> tmp(n, n);
  for (int s = 0; s < steps; ++s) {
    tmp.noalias() = power * w;
    power.swap(tmp);
    sum += power;
  }
  return sum;
}

// Tensor-product-graph diffusion: A_1 = W, A_{t+1} = W A_t W^T + I, run for at
// most `config.steps` updates with early stop at `config.tol`.
template <typename Derived>
DiffusionResult<typename Derived::Scalar> tpg_diffuse(
    const Eigen::MatrixBase<Derived>& w, const DiffusionConfig& config = {}) {
  using Scalar = typename Derived::Scalar;
  config.validate();
  detail::require_square(w, "tpg_diffuse");
  detail::require_nonnegative(w, "tpg_diffuse");
  detail::require_substochastic(w, "tpg_diffuse");
  const auto n = w.rows();
  const Matrix<Scalar> wm = w;
  const Matrix<Scalar> wt = wm.transpose();

  DiffusionResult<Scalar> res;
  Matrix<Scalar> a = wm;
  Matrix<Scalar> tmp(n, n);
  Matrix<Scalar> next(n, n);
  for (int s = 1; s <= config.steps; ++s) {
    tmp.noalias() = wm * a;
    next.noalias() = tmp * wt;
    next.diagonal().array() += Scalar(1);
    res.last_change = detail::relative_change(next, a);
    a.swap(next);
    res.steps_run = s;
    if (res.last_change < config.tol) {
      res.converged = true;
      break;
    }
  }
  res.affinity = std::move(a);
  return res;
}

// W (x) W laid out so that entry (a*N + i, b*N + j) is W(a, b) * W(i, j).
template <typename Derived>
Matrix<typename Derived::Scalar> tensor_affinity(
    const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  const auto n = w.rows();
  Matrix<Scalar> big(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      big.block(a * n, b * n, n, n) = w(a, b) * w;
  return big;
}

// Reference solution of the TPG diffusion: vec^-1((I - W(x)W)^-1 vec(I)).
// Dense O(N^6); for testing only.
template <typename Derived>
Matrix<typename Derived::Scalar> tpg_closed_form(
    const Eigen::MatrixBase<Derived>& w, Eigen::Index size_cap = 64) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(w, "tpg_closed_form");
  const auto n = w.rows();
  if (n > size_cap) {
    throw SizeError("tpg_closed_form: N = " + std::to_string(n) +
                    " exceeds the oracle cap of " + std::to_string(size_cap));
  }
  detail::require_substochastic(w, "tpg_closed_form");
  const auto nn = n * n;
  const Matrix<Scalar> system = Matrix<Scalar>::Identity(nn, nn) - tensor_affinity(w);
  const Matrix<Scalar> eye = Matrix<Scalar>::Identity(n, n);
  const Vector<Scalar> vec_eye = eye.reshaped();
  const Vector<Scalar> x = system.partialPivLu().solve(vec_eye);
  return x.reshaped(n, n);
}

}  // namespace dssc
