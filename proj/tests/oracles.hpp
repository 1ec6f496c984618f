#pragma once

// Reference computations used only by tests. Each one takes a different
// route from the library code it checks.

#include "dssc/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using dssc::Labels;
using dssc::MatrixXd;
using dssc::VectorXd;

// Per-column lasso min ||c||_1 + lambda/2 ||x_j - X c||^2 with c_j = 0,
// solved by cyclic coordinate descent to a tight fixed point. Returns the
// summed objective of all N columns.
inline double ssc_objective_by_coordinate_descent(const MatrixXd& x, double lambda,
                                                  MatrixXd* coefficients = nullptr) {
  const auto n = x.cols();
  const MatrixXd gram = x.transpose() * x;
  MatrixXd c = MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    VectorXd coef = VectorXd::Zero(n);
    VectorXd residual = x.col(j);
    for (int sweep = 0; sweep < 200000; ++sweep) {
      double biggest = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i == j) continue;
        const double rho = x.col(i).dot(residual) + gram(i, i) * coef(i);
        const double z = lambda * rho;
        double next = 0.0;
        if (z > 1.0) next = (z - 1.0) / (lambda * gram(i, i));
        if (z < -1.0) next = (z + 1.0) / (lambda * gram(i, i));
        const double delta = next - coef(i);
        if (delta != 0.0) {
          residual -= delta * x.col(i);
          coef(i) = next;
        }
        biggest = std::max(biggest, std::abs(delta));
      }
      if (biggest < 1e-15) break;
    }
    c.col(j) = coef;
  }
  if (coefficients) *coefficients = c;
  const MatrixXd e = x - x * c;
  return c.cwiseAbs().sum() + 0.5 * lambda * e.squaredNorm();
}

// sum_{i=0..terms} W^i (W^T)^i, the expanded series the TPG iteration sums.
inline MatrixXd tpg_series(const MatrixXd& w, int terms) {
  const auto n = w.rows();
  MatrixXd power = MatrixXd::Identity(n, n);
  MatrixXd sum = MatrixXd::Identity(n, n);
  for (int i = 1; i <= terms; ++i) {
    power = power * w;
    sum += power * power.transpose();
  }
  return sum;
}

// Clustering error by trying every injective relabeling of predicted values.
inline double clustering_error_brute_force(const Labels& predicted, const Labels& truth) {
  std::vector<int> pv(predicted.begin(), predicted.end());
  std::vector<int> tv(truth.begin(), truth.end());
  std::sort(pv.begin(), pv.end());
  pv.erase(std::unique(pv.begin(), pv.end()), pv.end());
  std::sort(tv.begin(), tv.end());
  tv.erase(std::unique(tv.begin(), tv.end()), tv.end());
  const std::size_t slots = std::max(pv.size(), tv.size());
  // perm[p] = index of truth value assigned to predicted value p (>= |tv|
  // means unmatched).
  std::vector<int> perm(slots);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const auto p = std::lower_bound(pv.begin(), pv.end(), predicted[i]) - pv.begin();
      const int t = perm[p];
      if (t < static_cast<int>(tv.size()) && tv[t] == truth[i]) ++hits;
    }
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return 1.0 - static_cast<double>(best) / static_cast<double>(truth.size());
}

// Random symmetric nonnegative W with zero diagonal, edge density `density`,
// rescaled so the largest row sum equals `max_row_sum`.
inline MatrixXd random_substochastic(int n, double max_row_sum, double density,
                                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatrixXd w = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < density) w(i, j) = w(j, i) = u(rng);
  const double top = w.rowwise().sum().maxCoeff();
  if (top > 0.0) w *= max_row_sum / top;
  return w;
}

// Random symmetric graph with positive weights and no isolated node.
inline MatrixXd random_connected_graph(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatrixXd w = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < 0.4) w(i, j) = w(j, i) = 0.1 + u(rng);
  for (int i = 0; i + 1 < n; ++i)  // path keeps every degree positive
    if (w(i, i + 1) == 0.0) w(i, i + 1) = w(i + 1, i) = 0.1 + u(rng);
  return w;
}

// Two equal halves; in-block edges with p_in, cross edges with p_out.
inline MatrixXd planted_partition(int n, double p_in, double p_out, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatrixXd w = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool same = (i < n / 2) == (j < n / 2);
      if (u(rng) < (same ? p_in : p_out)) w(i, j) = w(j, i) = 1.0;
    }
  return w;
}

}  // namespace oracle
