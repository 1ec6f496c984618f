#pragma once

#include "dssc/dataset.hpp"
#include "dssc/diffusion.hpp"
#include "dssc/sparse_coder.hpp"
#include "dssc/spectral.hpp"
#include "dssc/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

namespace dssc {

struct ClusteringError {
  double error = 0.0;  // misclassified / N
  std::size_t misclassified = 0;
  // Predicted label -> matched truth label. Predicted labels left without a
  // partner are absent; all their points count as misclassified.
  std::map<int, int> matching;
};

// Minimum-cost perfect assignment on a square cost matrix (Hungarian method,
// O(n^3)). Returns the column assigned to each row.
std::vector<int> solve_assignment(const MatrixXd& cost);

// Fraction of points misclassified under the best one-to-one matching of
// predicted to true labels.
ClusteringError clustering_error(const Labels& predicted, const Labels& truth);

enum class Method { kSsc, kDssc };

struct SweepOptions {
  SscConfig ssc;
  DiffusionConfig diffusion;
  int kmeans_restarts = 20;
  bool run_ssc = true;
  bool run_dssc = true;
  unsigned threads = 1;
};

struct SweepRun {
  double level = 0.0;
  std::uint64_t seed = 0;
  double ssc_error = 0.0;
  double dssc_error = 0.0;
  bool ssc_converged = false;
  int ssc_iterations = 0;
  int diffusion_steps = 0;
};

struct SweepReport {
  std::vector<double> levels;
  std::vector<std::uint64_t> seeds;
  std::vector<double> ssc_mean, dssc_mean;
  std::vector<double> ssc_std, dssc_std;
  std::vector<SweepRun> runs;  // ordered by (level, seed)
  bool ran_ssc = true;
  bool ran_dssc = true;
};

// One (level, seed) cell: generate, corrupt, code once, then cluster the
// plain SSC affinity and its diffused version with the same C.
SweepRun run_sweep_cell(const SyntheticSpec& spec, double level,
                        std::uint64_t seed, const SweepOptions& options);

// Cells are independent and may run on `options.threads` workers; the report
// does not depend on the thread count.
SweepReport run_corruption_sweep(const SyntheticSpec& spec,
                                 const std::vector<double>& levels,
                                 const std::vector<std::uint64_t>& seeds,
                                 const SweepOptions& options = {});

// `corruption,ssc_mean,dssc_mean,runs`, one row per level.
void write_sweep_csv(std::ostream& out, const SweepReport& report);
// One row per (level, seed).
void write_sweep_runs_csv(std::ostream& out, const SweepReport& report);

}  // namespace dssc
