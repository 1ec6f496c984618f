#include "dssc/dataset.hpp"

#include "dssc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace dssc {
namespace {

// Independent streams per purpose, all derived from the caller's seed.
enum class Stream : std::uint64_t { kBasis = 1, kRotation, kCoefficients, kCorruption };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream,
                            std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = normal(rng);
  return m;
}

// Q factor of a Gaussian matrix with the signs of R's diagonal folded in,
// which makes it Haar distributed.
MatrixXd haar_orthogonal(Eigen::Index rows, Eigen::Index cols,
                         std::mt19937_64& rng) {
  const MatrixXd g = gaussian(rows, cols, rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(rows, cols);
  const MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < cols; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (ambient_dim < 1 || num_subspaces < 1 || subspace_dim < 1 ||
      points_per_subspace < 1) {
    throw ParameterError("synthetic spec: all counts must be >= 1");
  }
  if (subspace_dim >= ambient_dim) {
    throw ParameterError("synthetic spec: subspace_dim (" +
                         std::to_string(subspace_dim) +
                         ") must be below ambient_dim (" +
                         std::to_string(ambient_dim) + ")");
  }
  if (!(corruption_fraction >= 0.0 && corruption_fraction <= 1.0)) {
    throw ParameterError("synthetic spec: corruption_fraction must be in [0, 1]");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw ParameterError("synthetic spec: noise_scale must be >= 0");
  }
}

MatrixXd random_rotation(int n, std::uint64_t seed) {
  if (n < 1) throw ParameterError("random_rotation: n must be >= 1");
  auto rng = make_engine(seed, Stream::kRotation);
  MatrixXd t = haar_orthogonal(n, n, rng);
  if (t.determinant() < 0.0) t.col(0) = -t.col(0);
  return t;
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int dim = spec.ambient_dim;
  const int sub = spec.subspace_dim;
  const int n = spec.points_per_subspace;

  auto basis_rng = make_engine(seed, Stream::kBasis);
  const MatrixXd u = haar_orthogonal(dim, sub, basis_rng);

  LabeledDataset out;
  out.data.resize(dim, spec.num_points());
  out.labels.resize(spec.num_points());
  for (int i = 0; i < spec.num_subspaces; ++i) {
    auto rot_rng = make_engine(seed, Stream::kRotation, i);
    MatrixXd t = haar_orthogonal(dim, dim, rot_rng);
    if (t.determinant() < 0.0) t.col(0) = -t.col(0);
    auto coef_rng = make_engine(seed, Stream::kCoefficients, i);
    const MatrixXd q = gaussian(sub, n, coef_rng);
    out.data.middleCols(i * n, n).noalias() = (t * u) * q;
    std::fill_n(out.labels.begin() + i * n, n, i);
  }
  if (spec.corruption_fraction > 0.0) {
    out.data = corrupt(out.data, spec.corruption_fraction, spec.noise_scale,
                       seed ^ 0x9e3779b97f4a7c15ULL);
  }
  return out;
}

MatrixXd corrupt(const MatrixXd& data, double fraction, double noise_scale,
                 std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ParameterError("corrupt: fraction must be in [0, 1]");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw ParameterError("corrupt: noise_scale must be >= 0");
  }
  const auto n = data.cols();
  const auto count = static_cast<Eigen::Index>(std::llround(fraction * n));
  MatrixXd out = data;
  if (count == 0) return out;

  auto rng = make_engine(seed, Stream::kCorruption);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // Partial Fisher-Yates: the first `count` entries are a uniform sample.
  for (Eigen::Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::sort(order.begin(), order.begin() + count);

  std::normal_distribution<double> normal(0.0, 1.0);
  const double dim = static_cast<double>(data.rows());
  for (Eigen::Index k = 0; k < count; ++k) {
    const Eigen::Index j = order[k];
    const double sigma = std::sqrt(noise_scale * data.col(j).norm() / dim);
    for (Eigen::Index r = 0; r < data.rows(); ++r)
      out(r, j) += sigma * normal(rng);
  }
  return out;
}

}  // namespace dssc
