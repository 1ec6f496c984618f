#pragma once

#include "dssc/diffusion.hpp"
#include "dssc/sparse_coder.hpp"
#include "dssc/types.hpp"

namespace dssc {

// Normalizes an SSC affinity and runs the configured diffusion variant. The
// returned affinity is symmetric with a zero diagonal, ready for spectral
// clustering. `steps` is the index t of the returned iterate: steps = 1 gives
// the normalized input back. The result is symmetrized as (A + A') / 2, which
// only removes round-off for the symmetric variants.
DiffusionResult<double> diffuse_affinity(const MatrixXd& w,
                                         const DiffusionConfig& config);

struct DsscResult {
  CoefficientMatrix code;
  MatrixXd ssc_affinity;  // |C| + |C'|
  DiffusionResult<double> diffusion;
};

// solve_ssc -> affinity_from_coefficients -> diffuse_affinity.
DsscResult dssc_affinity(const MatrixXd& data, const SscConfig& ssc_config,
                         const DiffusionConfig& diffusion_config);

// Share of affinity mass on pairs with different ground-truth labels,
// ignoring the diagonal.
double off_block_mass_ratio(const MatrixXd& affinity, const Labels& truth);

}  // namespace dssc
