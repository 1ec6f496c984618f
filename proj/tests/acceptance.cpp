// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "dssc/dataset.hpp"
#include "dssc/diffusion.hpp"
#include "dssc/eval.hpp"
#include "dssc/pipeline.hpp"
#include "dssc/sparse_coder.hpp"
#include "dssc/spectral.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

using dssc::DiffusionConfig;
using dssc::DiffusionVariant;
using dssc::ErrorNorm;
using dssc::Labels;
using dssc::MatrixXd;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Symmetric sub-stochastic instances shared by criteria 1-3. The largest row
// sum is drawn from [0.05, 0.85].
struct Instance {
  MatrixXd w;
};

std::vector<Instance> substochastic_instances() {
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<int> size(2, 30);
  std::uniform_real_distribution<double> top(0.05, 0.85), density(0.2, 1.0);
  std::vector<Instance> out;
  for (int i = 0; i < 50; ++i) {
    const int n = size(rng);
    MatrixXd w = oracle::random_substochastic(n, top(rng), density(rng), rng);
    out.push_back({std::move(w)});
  }
  // Make sure both ends of the size range are present.
  out[0].w = oracle::random_substochastic(2, 0.8, 1.0, rng);
  out[1].w = oracle::random_substochastic(30, 0.85, 0.5, rng);
  return out;
}

Verdict tpg_oracle(const std::vector<Instance>& cases) {
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto res = dssc::tpg_diffuse(c.w);
    worst = std::max(worst, (res.affinity - dssc::tpg_closed_form(c.w)).norm());
  }
  return {worst <= 1e-8, fmt("50 instances, max ||tpg - closed form||_F = %.3e (bound 1e-8)", worst)};
}

Verdict tpg_fixed_point(const std::vector<Instance>& cases) {
  double worst = 0.0;
  for (const auto& c : cases) {
    const MatrixXd a = dssc::tpg_diffuse(c.w).affinity;
    const MatrixXd next =
        c.w * a * c.w.transpose() + MatrixXd::Identity(c.w.rows(), c.w.cols());
    worst = std::max(worst, (a - next).norm());
  }
  return {worst <= 1e-8, fmt("max ||A - (W A W' + I)||_F = %.3e (bound 1e-8)", worst)};
}

Verdict accumulate_limit(const std::vector<Instance>& cases) {
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto n = c.w.rows();
    const MatrixXd direct =
        (MatrixXd::Identity(n, n) - c.w).partialPivLu().solve(MatrixXd::Identity(n, n));
    worst = std::max(worst, (dssc::accumulate_diffuse(c.w, 200) - direct).norm());
  }
  return {worst <= 1e-10, fmt("max ||sum_{i<=200} W^i - (I-W)^-1||_F = %.3e (bound 1e-10)", worst)};
}

Verdict block_preservation() {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> blocks(2, 4), bsize(2, 8), variant(0, 4);
  std::uniform_real_distribution<double> density(0.3, 1.0);
  const DiffusionVariant variants[] = {DiffusionVariant::kPower, DiffusionVariant::kAccumulate,
                                       DiffusionVariant::kPageRank, DiffusionVariant::kLcdp,
                                       DiffusionVariant::kTpg};
  const dssc::Normalization modes[] = {dssc::Normalization::kBalanced,
                                       dssc::Normalization::kSymmetric,
                                       dssc::Normalization::kRow};
  int leaks = 0, checks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = blocks(rng);
    std::vector<int> owner;
    for (int b = 0; b < k; ++b) owner.insert(owner.end(), bsize(rng), b);
    const int n = static_cast<int>(owner.size());
    MatrixXd w = oracle::random_substochastic(n, 5.0, density(rng), rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (owner[i] != owner[j]) w(i, j) = 0.0;

    auto leaked = [&](const MatrixXd& a) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (owner[i] != owner[j] && a(i, j) != 0.0) return true;
      return false;
    };
    for (const auto v : variants) {
      for (const auto mode : modes) {
        DiffusionConfig cfg;
        cfg.variant = v;
        cfg.normalization = mode;
        cfg.knn = std::min(3, n - 1);
        ++checks;
        if (leaked(dssc::diffuse_affinity(w, cfg).affinity)) ++leaks;
      }
    }
    // The raw operators as well, with a block-diagonal restart matrix.
    const MatrixXd ws = dssc::normalize_substochastic(w, 0.9);
    const MatrixXd p = dssc::transition_matrix(w);
    const MatrixXd eye = MatrixXd::Identity(n, n);
    const MatrixXd raw[] = {
        dssc::power_diffuse(ws, p, 50),
        dssc::accumulate_diffuse(ws, 200),
        dssc::accumulate_diffuse(ws, -1),
        dssc::pagerank_diffuse(ws, p, 0.85, eye, 1e-12, 500).affinity,
        dssc::lcdp_diffuse(ws, dssc::transition_matrix(dssc::knn_sparsify(w, std::min(3, n - 1))), 50),
        dssc::tpg_diffuse(ws).affinity,
    };
    for (const auto& a : raw) {
      ++checks;
      if (leaked(a)) ++leaks;
    }
  }
  return {leaks == 0, fmt("100 block structures, %d outputs, %d with a non-zero off-block entry",
                          checks, leaks)};
}

Verdict clean_clustering() {
  const dssc::SyntheticSpec spec;
  dssc::SweepOptions opt;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::uint64_t> seeds(10);
  std::iota(seeds.begin(), seeds.end(), 0);
  const auto rep = dssc::run_corruption_sweep(spec, {0.0}, seeds, opt);
  int bad = 0;
  for (const auto& r : rep.runs) bad += (r.ssc_error != 0.0) + (r.dssc_error != 0.0);
  return {bad == 0, fmt("10 seeds, mean error SSC %.4f DSSC %.4f, %d non-zero runs",
                        rep.ssc_mean[0], rep.dssc_mean[0], bad)};
}

Verdict corruption_trend() {
  dssc::SyntheticSpec spec;
  spec.noise_scale = 3.0;
  dssc::SweepOptions opt;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::uint64_t> seeds(10);
  std::iota(seeds.begin(), seeds.end(), 0);
  const std::vector<double> levels{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const auto rep = dssc::run_corruption_sweep(spec, levels, seeds, opt);
  bool within = true;
  int lower = 0;
  std::string table;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    within = within && rep.dssc_mean[i] <= rep.ssc_mean[i] + 0.02;
    if (levels[i] > 0.0 && rep.dssc_mean[i] < rep.ssc_mean[i]) ++lower;
    table += fmt(" %.0f%%:%.4f/%.4f", 100 * levels[i], rep.ssc_mean[i], rep.dssc_mean[i]);
  }
  return {within && lower >= 3,
          fmt("SSC/DSSC mean error%s; DSSC lower at %d of 5 noisy levels", table.c_str(), lower)};
}

Verdict walk_identities() {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> size(3, 40);
  double worst_pi = 0.0, worst_ncut = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng);
    const MatrixXd w = oracle::random_connected_graph(n, rng);
    const auto pi = dssc::stationary_distribution(w);
    const MatrixXd p = dssc::transition_matrix(w);
    worst_pi = std::max(worst_pi, (p.transpose() * pi - pi).cwiseAbs().maxCoeff());
    std::uniform_int_distribution<int> cut(1, n - 1);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Labels labels(n, 1);
    const int a = cut(rng);
    for (int i = 0; i < a; ++i) labels[order[i]] = 0;
    const auto v = dssc::ncut(w, labels);
    worst_ncut = std::max(worst_ncut, std::abs(v.edge - v.walk));
  }
  return {worst_pi <= 1e-10 && worst_ncut <= 1e-12,
          fmt("100 graphs, max ||P'pi - pi||_inf = %.3e, max |edge - walk| = %.3e", worst_pi,
              worst_ncut)};
}

Verdict ncut_improvement() {
  int wins = 0;
  double sum_before = 0.0, sum_after = 0.0;
  Labels truth(60);
  for (int i = 0; i < 60; ++i) truth[i] = i < 30 ? 0 : 1;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const MatrixXd w = oracle::planted_partition(60, 0.5, 0.05, rng);
    const DiffusionConfig cfg;
    const MatrixXd diffused = dssc::diffuse_affinity(w, cfg).affinity;
    const MatrixXd renorm =
        dssc::normalize_substochastic(diffused, cfg.substochastic_scale, cfg.normalization);
    const double before = dssc::ncut(w, truth).edge;
    const double after = dssc::ncut(renorm, truth).edge;
    sum_before += before;
    sum_after += after;
    if (after < before) ++wins;
  }
  return {wins >= 95, fmt("diffused NCut lower in %d of 100 seeds (need 95); mean NCut %.4f -> %.4f",
                          wins, sum_before / 100, sum_after / 100)};
}

struct OracleCase {
  int d, n;
  double factor;
  ErrorNorm norm;
  double objective;
  std::vector<std::vector<double>> rows;
};

Verdict sparse_coder_oracle() {
  static const std::vector<OracleCase> frozen = {
#include "oracle_cases.inc"
  };
  double worst = 0.0;
  bool diag_zero = true;
  int count = 0;
  int unconverged = 0;
  auto record = [&](const dssc::CoefficientMatrix& r, ErrorNorm norm, double expected) {
    worst = std::max(worst, std::abs(r.objective(norm) - expected) / expected);
    diag_zero = diag_zero && r.coefficients.diagonal().cwiseAbs().maxCoeff() == 0.0;
    if (!r.converged) ++unconverged;
    ++count;
  };
  // Solved to a tight residual tolerance; the default 1e-4 stop is tuned for
  // clustering, not for matching objectives to four digits.
  auto tight = [](ErrorNorm norm, double factor) {
    dssc::SscConfig cfg;
    cfg.error_norm = norm;
    cfg.sparsity_weight_factor = factor;
    cfg.primal_tol = 1e-8;
    cfg.dual_tol = 1e-8;
    cfg.max_iters = 50000;
    return cfg;
  };
  for (const auto& c : frozen) {
    MatrixXd x(c.d, c.n);
    for (int i = 0; i < c.d; ++i)
      for (int j = 0; j < c.n; ++j) x(i, j) = c.rows[i][j];
    record(dssc::solve_ssc(x, tight(c.norm, c.factor)), c.norm, c.objective);
  }
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> size(2, 12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = size(rng), d = std::max(2, size(rng) / 2 + 1);
    MatrixXd x(d, n);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
    const auto r = dssc::solve_ssc(x, tight(ErrorNorm::kFrobenius, 2.0 + trial));
    record(r, ErrorNorm::kFrobenius,
           oracle::ssc_objective_by_coordinate_descent(dssc::normalize_columns(x), r.lambda));
  }
  return {worst <= 1e-4 && diag_zero,
          fmt("%d instances (N <= 12, %d unconverged), max relative objective gap %.3e "
              "(bound 1e-4), diagonal %s",
              count, unconverged, worst, diag_zero ? "exactly zero" : "NOT zero")};
}

Verdict clustering_error_enumeration() {
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<int> ks(1, 6), len(1, 30);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int kp = ks(rng), kt = ks(rng), n = len(rng);
    std::uniform_int_distribution<int> p(0, kp - 1), t(0, kt - 1);
    Labels a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = p(rng);
      b[i] = t(rng);
    }
    if (std::abs(dssc::clustering_error(a, b).error -
                 oracle::clustering_error_brute_force(a, b)) > 1e-15)
      ++mismatches;
  }
  return {mismatches == 0, fmt("1000 label pairs with k <= 6, %d mismatches", mismatches)};
}

}  // namespace

int main() {
  const auto cases = substochastic_instances();
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"tpg iteration equals Kronecker closed form", [&] { return tpg_oracle(cases); }},
      {"tpg fixed-point identity", [&] { return tpg_fixed_point(cases); }},
      {"accumulated diffusion limit", [&] { return accumulate_limit(cases); }},
      {"block preservation", block_preservation},
      {"clean-data clustering", clean_clustering},
      {"corruption-sweep trend", corruption_trend},
      {"random-walk identities", walk_identities},
      {"NCut improvement", ncut_improvement},
      {"sparse-coder oracle", sparse_coder_oracle},
      {"clustering error vs enumeration", clustering_error_enumeration},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::printf("[%s] AC%zu %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
