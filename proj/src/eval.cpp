#include "dssc/eval.hpp"

#include "dssc/error.hpp"
#include "dssc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

namespace dssc {

std::vector<int> solve_assignment(const MatrixXd& cost) {
  if (cost.rows() != cost.cols()) {
    throw DimensionError("solve_assignment: cost matrix must be square");
  }
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials u (rows), v (cols); way[] records the augmenting path.
  // Index 0 is a virtual column, so everything is shifted by one.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> owner(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    owner[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int r = owner[col0];
      double delta = inf;
      int col1 = 0;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r - 1, c - 1) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          u[owner[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const int col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int c = 1; c <= n; ++c)
    if (owner[c] != 0) assignment[owner[c] - 1] = c - 1;
  return assignment;
}

ClusteringError clustering_error(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) {
    throw ParameterError("clustering_error: label vectors differ in length (" +
                         std::to_string(predicted.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
  }
  if (truth.empty()) throw ParameterError("clustering_error: empty label vectors");

  std::vector<int> pred_values(predicted.begin(), predicted.end());
  std::vector<int> true_values(truth.begin(), truth.end());
  for (auto* vals : {&pred_values, &true_values}) {
    std::sort(vals->begin(), vals->end());
    vals->erase(std::unique(vals->begin(), vals->end()), vals->end());
  }
  const auto index_of = [](const std::vector<int>& vals, int v) {
    return static_cast<int>(std::lower_bound(vals.begin(), vals.end(), v) - vals.begin());
  };
  const int np = static_cast<int>(pred_values.size());
  const int nt = static_cast<int>(true_values.size());
  const int size = std::max(np, nt);

  MatrixXd overlap = MatrixXd::Zero(size, size);
  for (std::size_t i = 0; i < truth.size(); ++i)
    overlap(index_of(pred_values, predicted[i]), index_of(true_values, truth[i])) += 1.0;

  // Maximize matched points == minimize (max - overlap).
  const MatrixXd cost = MatrixXd::Constant(size, size, overlap.maxCoeff()) - overlap;
  const auto assignment = solve_assignment(cost);

  ClusteringError out;
  double matched = 0.0;
  for (int p = 0; p < np; ++p) {
    const int t = assignment[p];
    if (t < nt) {
      out.matching[pred_values[p]] = true_values[t];
      matched += overlap(p, t);
    }
  }
  out.misclassified = truth.size() - static_cast<std::size_t>(std::llround(matched));
  out.error = static_cast<double>(out.misclassified) / static_cast<double>(truth.size());
  return out;
}

SweepRun run_sweep_cell(const SyntheticSpec& spec, double level,
                        std::uint64_t seed, const SweepOptions& options) {
  SyntheticSpec cell = spec;
  cell.corruption_fraction = level;
  const auto ds = generate_synthetic(cell, seed);

  SpectralConfig sc;
  sc.num_clusters = cell.num_subspaces;
  sc.kmeans_restarts = options.kmeans_restarts;
  sc.seed = seed;

  SweepRun run;
  run.level = level;
  run.seed = seed;
  const auto code = solve_ssc(ds.data, options.ssc);
  run.ssc_converged = code.converged;
  run.ssc_iterations = code.iterations;
  const MatrixXd w = affinity_from_coefficients(code.coefficients);
  if (options.run_ssc) {
    run.ssc_error = clustering_error(spectral_cluster(w, sc).labels, ds.labels).error;
  }
  if (options.run_dssc) {
    const auto diffused = diffuse_affinity(w, options.diffusion);
    run.diffusion_steps = diffused.steps_run;
    run.dssc_error =
        clustering_error(spectral_cluster(diffused.affinity, sc).labels, ds.labels).error;
  }
  return run;
}

SweepReport run_corruption_sweep(const SyntheticSpec& spec,
                                 const std::vector<double>& levels,
                                 const std::vector<std::uint64_t>& seeds,
                                 const SweepOptions& options) {
  if (levels.empty()) throw ParameterError("sweep: no corruption levels");
  if (seeds.empty()) throw ParameterError("sweep: no seeds");
  if (!options.run_ssc && !options.run_dssc) throw ParameterError("sweep: no methods");
  for (const double l : levels)
    if (!(l >= 0.0 && l <= 1.0)) throw ParameterError("sweep: level outside [0, 1]");
  spec.validate();
  options.ssc.validate();
  options.diffusion.validate();

  SweepReport report;
  report.levels = levels;
  report.seeds = seeds;
  report.ran_ssc = options.run_ssc;
  report.ran_dssc = options.run_dssc;
  const std::size_t cells = levels.size() * seeds.size();
  report.runs.resize(cells);

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(cells);
  const auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      try {
        report.runs[c] = run_sweep_cell(spec, levels[c / seeds.size()],
                                        seeds[c % seeds.size()], options);
      } catch (...) {
        failures[c] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, cells));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  const auto stats = [&](std::size_t li, auto field) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const double v = report.runs[li * seeds.size() + s].*field;
      sum += v;
      sq += v * v;
    }
    const double n = static_cast<double>(seeds.size());
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
    return std::pair{mean, std::sqrt(var)};
  };
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const auto [sm, ss] = stats(li, &SweepRun::ssc_error);
    const auto [dm, ds] = stats(li, &SweepRun::dssc_error);
    report.ssc_mean.push_back(sm);
    report.ssc_std.push_back(ss);
    report.dssc_mean.push_back(dm);
    report.dssc_std.push_back(ds);
  }
  return report;
}

namespace {

void put_mean(std::ostream& out, bool ran, double v) {
  if (ran) {
    out << std::fixed << std::setprecision(6) << v;
  } else {
    out << "NA";
  }
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "corruption,ssc_mean,dssc_mean,runs\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    out << std::fixed << std::setprecision(2) << report.levels[i] << ',';
    put_mean(out, report.ran_ssc, report.ssc_mean[i]);
    out << ',';
    put_mean(out, report.ran_dssc, report.dssc_mean[i]);
    out << ',' << report.seeds.size() << '\n';
  }
}

void write_sweep_runs_csv(std::ostream& out, const SweepReport& report) {
  out << "corruption,seed,ssc_error,dssc_error,ssc_converged,ssc_iterations,"
         "diffusion_steps\n";
  for (const auto& r : report.runs) {
    out << std::fixed << std::setprecision(2) << r.level << ',' << r.seed << ',';
    put_mean(out, report.ran_ssc, r.ssc_error);
    out << ',';
    put_mean(out, report.ran_dssc, r.dssc_error);
    out << ',' << (r.ssc_converged ? "true" : "false") << ',' << r.ssc_iterations
        << ',' << r.diffusion_steps << '\n';
  }
}

}  // namespace dssc
