#pragma once

#include "dssc/types.hpp"

#include <cstdint>

namespace dssc {

// Union-of-subspaces generator settings. Defaults are the 5 x 5-dim subspaces
// of R^100 with 50 points each used for the synthetic benchmark.
struct SyntheticSpec {
  int ambient_dim = 100;
  int num_subspaces = 5;
  int subspace_dim = 5;
  int points_per_subspace = 50;
  double corruption_fraction = 0.0;
  // Per-entry noise variance is noise_scale * ||x|| / ambient_dim.
  double noise_scale = 0.3;

  // Throws ParameterError when a field is out of range.
  void validate() const;
  int num_points() const { return num_subspaces * points_per_subspace; }
};

struct LabeledDataset {
  MatrixXd data;  // D x N, one point per column
  Labels labels;  // N entries in [0, k)
};

// Draws U (D x d, orthonormal columns) and one random rotation T_i per
// subspace; class i holds points T_i U Q_i with standard Gaussian Q_i.
// Columns are grouped by class. A `corruption_fraction` share of columns is
// then passed through corrupt() with a seed derived from `seed`.
LabeledDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// Adds zero-mean Gaussian noise to exactly round(fraction * N) columns chosen
// uniformly without replacement. Column x gets per-entry standard deviation
// sqrt(noise_scale * ||x||_2 / D); untouched columns are copied bit-for-bit.
MatrixXd corrupt(const MatrixXd& data, double fraction, double noise_scale,
                 std::uint64_t seed);

// Uniformly distributed rotation (orthogonal, det = +1) of size n.
MatrixXd random_rotation(int n, std::uint64_t seed);

}  // namespace dssc
