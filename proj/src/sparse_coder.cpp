#include "dssc/sparse_coder.hpp"

#include "dssc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dssc {
namespace {

// Elementwise shrinkage toward zero by `tau`.
template <typename Derived>
MatrixXd soft_threshold(const Eigen::MatrixBase<Derived>& v, double tau) {
  return v.unaryExpr([tau](double x) {
    if (x > tau) return x - tau;
    if (x < -tau) return x + tau;
    return 0.0;
  });
}

// Applies (a X'X + b I)^-1 to N x N matrices. With fewer rows than columns
// the Woodbury form (1/b)(I - X' (b/a I + X X')^-1 X) costs O(D N^2) per
// product instead of O(N^3).
class ShiftedGramSolver {
 public:
  ShiftedGramSolver(const MatrixXd& x, double a, double b) : b_(b) {
    const auto d = x.rows();
    const auto n = x.cols();
    if (d < n) {
      x_ = x;
      const MatrixXd small = (b / a) * MatrixXd::Identity(d, d) + x * x.transpose();
      xt_k_ = x.transpose() * factor(small).solve(MatrixXd::Identity(d, d));
    } else {
      const MatrixXd big = a * (x.transpose() * x) + b * MatrixXd::Identity(n, n);
      inverse_ = factor(big).solve(MatrixXd::Identity(n, n));
    }
  }

  MatrixXd apply(const MatrixXd& m) const {
    if (inverse_.size() > 0) return inverse_ * m;
    MatrixXd out = m;
    const MatrixXd projected = x_ * m;
    out.noalias() -= xt_k_ * projected;
    return out / b_;
  }

 private:
  static Eigen::LLT<MatrixXd> factor(const MatrixXd& m) {
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
      throw InputError("solve_ssc: ADMM system matrix is not positive definite");
    }
    return llt;
  }

  double b_;
  MatrixXd x_;
  MatrixXd xt_k_;
  MatrixXd inverse_;
};

double max_abs(const MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// min ||C||_1 + lambda/2 ||X - XZ||_F^2  s.t.  Z = C, diag(C) = 0.
CoefficientMatrix solve_frobenius(const MatrixXd& x, double lambda,
                                  const SscConfig& cfg) {
  const auto n = x.cols();
  const double rho = cfg.admm_penalty;
  const MatrixXd gram = x.transpose() * x;
  const ShiftedGramSolver system(x, lambda, rho);
  const MatrixXd data_term = system.apply(lambda * gram);

  CoefficientMatrix out;
  out.lambda = lambda;
  MatrixXd c = MatrixXd::Zero(n, n);
  MatrixXd dual = MatrixXd::Zero(n, n);
  MatrixXd z(n, n);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    z = data_term + system.apply(rho * c - dual);
    MatrixXd c_next = soft_threshold(z + dual / rho, 1.0 / rho);
    c_next.diagonal().setZero();
    dual.noalias() += rho * (z - c_next);

    const double primal = max_abs(z - c_next);
    const double change = max_abs(c_next - c);
    c.swap(c_next);
    const MatrixXd e = x - x * c;
    out.residual_history.push_back(
        {primal, change, c.cwiseAbs().sum() + 0.5 * lambda * e.squaredNorm()});
    out.iterations = it;
    if (!c.allFinite()) break;
    if (primal < cfg.primal_tol && change < cfg.dual_tol) {
      out.converged = true;
      break;
    }
  }
  out.error = x - x * c;
  out.coefficients = std::move(c);
  return out;
}

// min ||C||_1 + lambda ||E||_1  s.t.  X = XZ + E, Z = C, diag(C) = 0.
CoefficientMatrix solve_l1(const MatrixXd& x, double lambda,
                           const SscConfig& cfg) {
  const auto n = x.cols();
  const double rho = cfg.admm_penalty;
  const ShiftedGramSolver system(x, 1.0, 1.0);

  CoefficientMatrix out;
  out.lambda = lambda;
  MatrixXd c = MatrixXd::Zero(n, n);
  MatrixXd e = MatrixXd::Zero(x.rows(), n);
  MatrixXd dual_fit = MatrixXd::Zero(x.rows(), n);
  MatrixXd dual_split = MatrixXd::Zero(n, n);
  MatrixXd z(n, n);
  MatrixXd fit(x.rows(), n);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const MatrixXd rhs =
        x.transpose() * (x - e + dual_fit / rho) + c - dual_split / rho;
    z = system.apply(rhs);
    MatrixXd c_next = soft_threshold(z + dual_split / rho, 1.0 / rho);
    c_next.diagonal().setZero();
    fit.noalias() = x - x * z;
    MatrixXd e_next = soft_threshold(fit + dual_fit / rho, lambda / rho);

    const MatrixXd fit_gap = fit - e_next;
    const MatrixXd split_gap = z - c_next;
    dual_fit.noalias() += rho * fit_gap;
    dual_split.noalias() += rho * split_gap;

    const double primal = std::max(max_abs(fit_gap), max_abs(split_gap));
    const double change =
        std::max(max_abs(c_next - c), max_abs(e_next - e));
    c.swap(c_next);
    e.swap(e_next);
    out.residual_history.push_back(
        {primal, change, c.cwiseAbs().sum() + lambda * e.cwiseAbs().sum()});
    out.iterations = it;
    if (!c.allFinite()) break;
    if (primal < cfg.primal_tol && change < cfg.dual_tol) {
      out.converged = true;
      break;
    }
  }
  out.coefficients = std::move(c);
  out.error = std::move(e);
  return out;
}

}  // namespace

void SscConfig::validate() const {
  if (!(sparsity_weight_factor > 0.0) || !(admm_penalty > 0.0)) {
    throw ParameterError("ssc config: weights must be positive");
  }
  if (max_iters < 1) throw ParameterError("ssc config: max_iters must be >= 1");
  if (!(primal_tol > 0.0) || !(dual_tol > 0.0)) {
    throw ParameterError("ssc config: tolerances must be positive");
  }
}

double CoefficientMatrix::objective(ErrorNorm norm) const {
  const double sparse = coefficients.cwiseAbs().sum();
  return norm == ErrorNorm::kFrobenius
             ? sparse + 0.5 * lambda * error.squaredNorm()
             : sparse + lambda * error.cwiseAbs().sum();
}

MatrixXd normalize_columns(const MatrixXd& data) {
  MatrixXd out = data;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const double norm = data.col(j).norm();
    if (!(norm > 0.0)) {
      throw InputError("column " + std::to_string(j) + " is all zeros");
    }
    out.col(j) /= norm;
  }
  return out;
}

double base_sparsity_weight(const MatrixXd& normalized, ErrorNorm norm) {
  if (norm == ErrorNorm::kL1) {
    return normalized.cwiseAbs().colwise().maxCoeff().minCoeff();
  }
  MatrixXd corr = (normalized.transpose() * normalized).cwiseAbs();
  corr.diagonal().setZero();
  return corr.colwise().maxCoeff().minCoeff();
}

CoefficientMatrix solve_ssc(const MatrixXd& data, const SscConfig& config) {
  config.validate();
  if (data.cols() < 2) throw InputError("solve_ssc: need at least 2 points");
  if (!data.allFinite()) throw InputError("solve_ssc: non-finite data");
  const MatrixXd x = normalize_columns(data);
  const double mu = base_sparsity_weight(x, config.error_norm);
  if (!(mu > 0.0)) {
    throw InputError(
        "solve_ssc: some point is orthogonal to every other point; the "
        "sparsity weight is undefined");
  }
  const double lambda = config.sparsity_weight_factor / mu;
  return config.error_norm == ErrorNorm::kFrobenius
             ? solve_frobenius(x, lambda, config)
             : solve_l1(x, lambda, config);
}

MatrixXd affinity_from_coefficients(const MatrixXd& coefficients) {
  if (coefficients.rows() != coefficients.cols()) {
    throw DimensionError("affinity_from_coefficients: C must be square");
  }
  MatrixXd w = coefficients.cwiseAbs() + coefficients.transpose().cwiseAbs();
  w.diagonal().setZero();
  return w;
}

}  // namespace dssc
