#include "dssc/pipeline.hpp"

#include "dssc/error.hpp"

namespace dssc {

DiffusionResult<double> diffuse_affinity(const MatrixXd& w,
                                         const DiffusionConfig& config) {
  config.validate();
  const auto n = w.rows();
  const MatrixXd normalized =
      normalize_substochastic(w, config.substochastic_scale, config.normalization);
  const int updates = config.steps - 1;

  DiffusionResult<double> res;
  switch (config.variant) {
    case DiffusionVariant::kTpg: {
      if (updates == 0) {
        res.affinity = normalized;
        break;
      }
      DiffusionConfig inner = config;
      inner.steps = updates;
      res = tpg_diffuse(normalized, inner);
      break;
    }
    case DiffusionVariant::kAccumulate:
      res.affinity = accumulate_diffuse(normalized, updates);
      res.steps_run = updates;
      break;
    case DiffusionVariant::kPower: {
      const MatrixXd p = transition_matrix(w);
      res.affinity = power_diffuse(normalized, p, updates);
      res.steps_run = updates;
      break;
    }
    case DiffusionVariant::kPageRank: {
      const MatrixXd p = transition_matrix(w);
      const MatrixXd eye = MatrixXd::Identity(n, n);
      if (updates == 0) {
        res.affinity = eye;
        break;
      }
      res = pagerank_diffuse(eye, p, config.restart_prob, eye, config.tol, updates);
      break;
    }
    case DiffusionVariant::kLcdp: {
      const MatrixXd local = knn_sparsify(w, std::min<int>(config.knn, n - 1));
      const MatrixXd p = transition_matrix(local);
      res.affinity = lcdp_diffuse(
          normalize_substochastic(local, config.substochastic_scale, config.normalization),
          p, updates);
      res.steps_run = updates;
      break;
    }
  }
  res.affinity = (0.5 * (res.affinity + res.affinity.transpose())).eval();
  res.affinity.diagonal().setZero();
  return res;
}

DsscResult dssc_affinity(const MatrixXd& data, const SscConfig& ssc_config,
                         const DiffusionConfig& diffusion_config) {
  diffusion_config.validate();
  DsscResult out;
  out.code = solve_ssc(data, ssc_config);
  out.ssc_affinity = affinity_from_coefficients(out.code.coefficients);
  out.diffusion = diffuse_affinity(out.ssc_affinity, diffusion_config);
  return out;
}

double off_block_mass_ratio(const MatrixXd& affinity, const Labels& truth) {
  if (affinity.rows() != affinity.cols() ||
      affinity.rows() != static_cast<Eigen::Index>(truth.size())) {
    throw DimensionError("off_block_mass_ratio: shape mismatch");
  }
  double total = 0.0;
  double off = 0.0;
  for (Eigen::Index j = 0; j < affinity.cols(); ++j) {
    for (Eigen::Index i = 0; i < affinity.rows(); ++i) {
      if (i == j) continue;
      const double v = std::abs(affinity(i, j));
      total += v;
      if (truth[i] != truth[j]) off += v;
    }
  }
  return total > 0.0 ? off / total : 0.0;
}

}  // namespace dssc
