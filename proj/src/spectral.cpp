#include "dssc/spectral.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

namespace dssc {
namespace {

std::mt19937_64 restart_engine(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart), 0x6b6du};
  return std::mt19937_64(seq);
}

// k-means++: first centre uniform, then proportional to squared distance.
MatrixXd seed_centroids(const MatrixXd& pts, int k, std::mt19937_64& rng) {
  const auto n = pts.rows();
  MatrixXd centres(k, pts.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centres.row(0) = pts.row(first(rng));
  VectorXd dist2 = (pts.rowwise() - centres.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        target -= dist2(pick);
        if (target < 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    centres.row(c) = pts.row(pick);
    dist2 = dist2.cwiseMin(
        (pts.rowwise() - centres.row(c)).rowwise().squaredNorm());
  }
  return centres;
}

struct LloydRun {
  Labels labels;
  MatrixXd centres;
  double inertia;
};

LloydRun lloyd(const MatrixXd& pts, MatrixXd centres, int max_iters) {
  const auto n = pts.rows();
  const int k = static_cast<int>(centres.rows());
  Labels labels(n, -1);
  VectorXd best(n);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int arg = 0;
      double min = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (pts.row(i) - centres.row(c)).squaredNorm();
        if (d < min) {
          min = d;
          arg = c;
        }
      }
      best(i) = min;
      if (labels[i] != arg) {
        labels[i] = arg;
        changed = true;
      }
    }
    if (!changed) break;
    MatrixXd sums = MatrixXd::Zero(k, pts.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[i]) += pts.row(i);
      ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centres.row(c) = sums.row(c) / counts[c];
      } else {
        // Empty cluster: move it onto the worst-served point.
        Eigen::Index far = 0;
        best.maxCoeff(&far);
        centres.row(c) = pts.row(far);
        best(far) = 0.0;
      }
    }
  }
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    inertia += (pts.row(i) - centres.row(labels[i])).squaredNorm();
  return {std::move(labels), std::move(centres), inertia};
}

}  // namespace

void SpectralConfig::validate(Eigen::Index n) const {
  if (num_clusters < 1) throw ParameterError("spectral: num_clusters must be >= 1");
  if (num_clusters > n) {
    throw ParameterError("spectral: num_clusters (" + std::to_string(num_clusters) +
                         ") exceeds the number of points (" + std::to_string(n) + ")");
  }
  if (kmeans_restarts < 1 || kmeans_max_iters < 1) {
    throw ParameterError("spectral: k-means restarts and iterations must be >= 1");
  }
  if (!(eig_tol > 0.0)) throw ParameterError("spectral: eig_tol must be positive");
}

Labels canonical_labels(const Labels& labels) {
  std::unordered_map<int, int> remap;
  Labels out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto [it, inserted] =
        remap.try_emplace(labels[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

KMeansResult kmeans(const MatrixXd& points, int k, int restarts, int max_iters,
                    std::uint64_t seed) {
  if (k < 1 || k > points.rows()) throw ParameterError("kmeans: need 1 <= k <= N");
  if (restarts < 1 || max_iters < 1) {
    throw ParameterError("kmeans: restarts and max_iters must be >= 1");
  }
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    auto rng = restart_engine(seed, r);
    auto run = lloyd(points, seed_centroids(points, k, rng), max_iters);
    if (run.inertia < best.inertia) {
      best.labels = std::move(run.labels);
      best.centroids = std::move(run.centres);
      best.inertia = run.inertia;
      best.best_restart = r;
    }
  }
  return best;
}

Partition spectral_cluster(const MatrixXd& w, const SpectralConfig& config) {
  detail::require_square(w, "spectral_cluster");
  const auto n = w.rows();
  config.validate(n);
  detail::require_nonnegative(w, "spectral_cluster");
  if (!(w.sum() > 0.0)) {
    throw DegenerateError("spectral_cluster: graph has no edges");
  }
  const int k = config.num_clusters;

  const VectorXd d = degrees(w);
  VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i)
    inv_sqrt(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
  MatrixXd lap = -(inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal());
  lap.diagonal().array() += 1.0;
  // Symmetrize away rounding so the solver sees an exactly symmetric input.
  lap = 0.5 * (lap + lap.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(lap);
  if (eig.info() != Eigen::Success) {
    throw DegenerateError("spectral_cluster: eigendecomposition failed");
  }
  Partition out;
  out.eigenvalues = eig.eigenvalues().head(k);
  out.embedding = eig.eigenvectors().leftCols(k);
  for (int c = 0; c < k; ++c) {
    const double res =
        (lap * out.embedding.col(c) - out.eigenvalues(c) * out.embedding.col(c)).norm();
    out.max_eig_residual = std::max(out.max_eig_residual, res);
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = out.embedding.row(i).norm();
    if (norm > 1e-12) {
      out.embedding.row(i) /= norm;
    } else {
      out.zero_rows.push_back(i);
    }
  }

  const auto km = kmeans(out.embedding, k, config.kmeans_restarts,
                         config.kmeans_max_iters, config.seed);
  out.labels = canonical_labels(km.labels);
  out.inertia = km.inertia;
  return out;
}

}  // namespace dssc
