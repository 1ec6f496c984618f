#pragma once

#include "dssc/types.hpp"

#include <vector>

namespace dssc {

enum class ErrorNorm {
  // min ||C||_1 + (lambda/2) ||X - XC||_F^2, dense Gaussian noise.
  kFrobenius,
  // min ||C||_1 + lambda ||E||_1 s.t. X = XC + E, sparse outlying entries.
  kL1,
};

struct SscConfig {
  ErrorNorm error_norm = ErrorNorm::kFrobenius;
  // lambda = sparsity_weight_factor / mu, with mu the data-dependent weight
  // below which the all-zero code is optimal.
  double sparsity_weight_factor = 20.0;
  double admm_penalty = 5.0;
  int max_iters = 2000;
  // Max-abs residuals: primal ||Z - C||, dual ||C_k - C_{k-1}||.
  double primal_tol = 1e-4;
  double dual_tol = 1e-4;

  void validate() const;
};

struct ResidualSample {
  double primal;
  double dual;
  double objective;
};

struct CoefficientMatrix {
  MatrixXd coefficients;  // C, N x N, exactly zero diagonal
  MatrixXd error;         // E, D x N, in column-normalized coordinates
  std::vector<ResidualSample> residual_history;
  double lambda = 0.0;    // weight on the error term actually used
  int iterations = 0;
  bool converged = false;

  // ||C||_1 + the weighted error term, at the returned iterate.
  double objective(ErrorNorm norm) const;
};

// Unit l2 norm per column. Throws InputError on an all-zero column.
MatrixXd normalize_columns(const MatrixXd& data);

// The data-dependent base weight: min_j max_{i != j} |x_i' x_j| for the
// Frobenius model, min_j ||x_j||_inf for the l1 model, on normalized columns.
double base_sparsity_weight(const MatrixXd& normalized, ErrorNorm norm);

// Self-expressive sparse coding of the columns of `data` via ADMM. Columns
// are l2-normalized first; C and E are reported in those coordinates.
CoefficientMatrix solve_ssc(const MatrixXd& data, const SscConfig& config = {});

// |C| + |C'|, symmetric and nonnegative with zero diagonal.
MatrixXd affinity_from_coefficients(const MatrixXd& coefficients);

}  // namespace dssc
