#pragma once

#include "dssc/diffusion.hpp"
#include "dssc/error.hpp"
#include "dssc/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dssc {

struct SpectralConfig {
  int num_clusters = 2;
  int kmeans_restarts = 20;
  int kmeans_max_iters = 300;
  std::uint64_t seed = 0;
  // Bound on ||L v - lambda v||_2 for every eigenpair used.
  double eig_tol = 1e-8;

  void validate(Eigen::Index n) const;
};

struct KMeansResult {
  Labels labels;
  MatrixXd centroids;  // k x dim
  double inertia = 0.0;
  int best_restart = 0;
};

// Lloyd's algorithm on the rows of `points`, k-means++ seeding, best of
// `restarts` by within-cluster sum of squares (ties to the earlier restart).
// Restart r draws from a stream keyed on (seed, r).
KMeansResult kmeans(const MatrixXd& points, int k, int restarts, int max_iters,
                    std::uint64_t seed);

struct Partition {
  Labels labels;
  VectorXd eigenvalues;   // k smallest of L_sym, ascending
  MatrixXd embedding;     // N x k, rows unit length unless zero
  std::vector<Eigen::Index> zero_rows;  // isolated nodes, not normalized
  double max_eig_residual = 0.0;
  double inertia = 0.0;
};

// Normalized-Laplacian spectral clustering: bottom-k eigenvectors of
// I - D^-1/2 W D^-1/2, rows scaled to unit length, then k-means. Labels are
// renumbered in order of first appearance.
Partition spectral_cluster(const MatrixXd& w, const SpectralConfig& config);

// Rewrites labels so that they appear as 0, 1, 2, ... in index order.
Labels canonical_labels(const Labels& labels);

using IndexSet = std::vector<Eigen::Index>;

// pi_i = d_i / vol(V).
template <typename Derived>
Vector<typename Derived::Scalar> stationary_distribution(
    const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  const Scalar vol = volume(w);
  if (!(vol > Scalar(0))) {
    throw DegenerateError("stationary_distribution: graph has zero volume");
  }
  return degrees(w) / vol;
}

namespace detail {

inline void require_disjoint(const IndexSet& a, const IndexSet& b, Eigen::Index n,
                             const char* who) {
  if (a.empty() || b.empty()) {
    throw ParameterError(std::string(who) + ": index sets must be non-empty");
  }
  std::vector<char> mark(n, 0);
  for (const auto i : a) {
    if (i < 0 || i >= n) throw ParameterError(std::string(who) + ": index out of range");
    mark[i] = 1;
  }
  for (const auto j : b) {
    if (j < 0 || j >= n) throw ParameterError(std::string(who) + ": index out of range");
    if (mark[j]) throw ParameterError(std::string(who) + ": sets overlap");
  }
}

}  // namespace detail

namespace detail {

// Mass moved from `from` into `to` in `steps` walk steps, started from pi
// restricted to `from`. Sets may overlap.
template <typename Derived>
typename Derived::Scalar transition_mass(const Eigen::MatrixBase<Derived>& w,
                                         const IndexSet& from,
                                         const IndexSet& to, int steps) {
  using Scalar = typename Derived::Scalar;
  if (steps == 1) {
    Scalar vol_from = 0;
    Scalar cut = 0;
    for (const auto i : from) {
      vol_from += w.row(i).sum();
      for (const auto j : to) cut += w(i, j);
    }
    if (!(vol_from > Scalar(0))) {
      throw DegenerateError("partition_transition_prob: vol(A) is zero");
    }
    return cut / vol_from;
  }
  const Vector<Scalar> pi = stationary_distribution(w);
  const Matrix<Scalar> p = transition_matrix(w);
  // Only rows in `from` matter; propagate them instead of forming P^t.
  Matrix<Scalar> rows(from.size(), w.cols());
  for (std::size_t r = 0; r < from.size(); ++r) rows.row(r) = p.row(from[r]);
  for (int s = 1; s < steps; ++s) rows = rows * p;
  Scalar mass = 0;
  Scalar joint = 0;
  for (std::size_t r = 0; r < from.size(); ++r) {
    const Scalar weight = pi(from[r]);
    mass += weight;
    for (const auto j : to) joint += weight * rows(r, j);
  }
  if (!(mass > Scalar(0))) {
    throw DegenerateError("partition_transition_prob: pi(A) is zero");
  }
  return joint / mass;
}

}  // namespace detail

// P_t(B | A): probability that a walk started from the stationary
// distribution restricted to A is in B after t steps. For t = 1 this is
// (1 / vol(A)) sum_{i in A, j in B} w_ij.
template <typename Derived>
typename Derived::Scalar partition_transition_prob(
    const Eigen::MatrixBase<Derived>& w, const IndexSet& from,
    const IndexSet& to, int steps = 1) {
  detail::require_square(w, "partition_transition_prob");
  detail::require_disjoint(from, to, w.rows(), "partition_transition_prob");
  if (steps < 1) throw ParameterError("partition_transition_prob: t must be >= 1");
  return detail::transition_mass(w, from, to, steps);
}

template <typename Scalar>
struct NCutValue {
  Scalar edge;  // sum over clusters of cut(C, ~C) / vol(C)
  Scalar walk;  // sum over clusters of P(~C | C)
};

// Normalized cut in the edge-sum and random-walk forms. For two clusters
// this is (1/vol(A) + 1/vol(~A)) cut(A, ~A) = P(~A|A) + P(A|~A); more
// clusters sum the per-cluster escape terms.
template <typename Derived>
NCutValue<typename Derived::Scalar> ncut(const Eigen::MatrixBase<Derived>& w,
                                         const Labels& labels) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(w, "ncut");
  const auto n = w.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw DimensionError("ncut: label count differs from graph size");
  }
  const Labels canon = canonical_labels(labels);
  const int k = canon.empty() ? 0 : *std::max_element(canon.begin(), canon.end()) + 1;
  if (k < 2) throw ParameterError("ncut: partition needs at least two non-empty sides");

  std::vector<IndexSet> members(k);
  for (Eigen::Index i = 0; i < n; ++i) members[canon[i]].push_back(i);

  // Edge form straight from the weights.
  const Vector<Scalar> d = degrees(w);
  NCutValue<Scalar> out{0, 0};
  for (int c = 0; c < k; ++c) {
    Scalar vol = 0;
    Scalar cut = 0;
    for (const auto i : members[c]) {
      vol += d(i);
      for (Eigen::Index j = 0; j < n; ++j)
        if (canon[j] != c) cut += w(i, j);
    }
    if (!(vol > Scalar(0))) throw DegenerateError("ncut: a cluster has zero volume");
    out.edge += cut / vol;
  }

  // Walk form through pi and P: P(~C | C) = sum_{i in C} pi_i P(i, ~C) / pi(C).
  const Vector<Scalar> pi = stationary_distribution(w);
  const Matrix<Scalar> p = transition_matrix(w);
  for (int c = 0; c < k; ++c) {
    Scalar mass = 0;
    Scalar joint = 0;
    for (const auto i : members[c]) {
      mass += pi(i);
      Scalar leave = 0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (canon[j] != c) leave += p(i, j);
      joint += pi(i) * leave;
    }
    out.walk += joint / mass;
  }
  return out;
}

template <typename Scalar>
struct WalkDiagnostics {
  Vector<Scalar> stationary;
  Scalar escape_prob;     // P_t(~A | A)
  Scalar retention_prob;  // P_t(A | A)
  Scalar ncut_edge;
  Scalar ncut_walk;
};

// Random-walk summary of a two-way split: `side` lists the nodes of A.
template <typename Derived>
WalkDiagnostics<typename Derived::Scalar> walk_diagnostics(
    const Eigen::MatrixBase<Derived>& w, const IndexSet& side, int steps = 1) {
  using Scalar = typename Derived::Scalar;
  const auto n = w.rows();
  std::vector<char> in_a(n, 0);
  for (const auto i : side) {
    if (i < 0 || i >= n) throw ParameterError("walk_diagnostics: index out of range");
    in_a[i] = 1;
  }
  IndexSet rest;
  Labels labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    labels[i] = in_a[i] ? 0 : 1;
    if (!in_a[i]) rest.push_back(i);
  }
  WalkDiagnostics<Scalar> out;
  out.stationary = stationary_distribution(w);
  out.escape_prob = partition_transition_prob(w, side, rest, steps);
  out.retention_prob = detail::transition_mass(w, side, side, steps);
  const auto cut = ncut(w, labels);
  out.ncut_edge = cut.edge;
  out.ncut_walk = cut.walk;
  return out;
}

}  // namespace dssc
