// dssc: synthetic data, sparse / diffusion subspace clustering, sweeps and
// scoring from the command line.
//
// Exit codes: 0 success, 1 runtime or numerical failure, 2 usage error.

#include "dssc/dataset.hpp"
#include "dssc/diffusion.hpp"
#include "dssc/error.hpp"
#include "dssc/eval.hpp"
#include "dssc/keyvalue.hpp"
#include "dssc/matrix_io.hpp"
#include "dssc/pipeline.hpp"
#include "dssc/sparse_coder.hpp"
#include "dssc/spectral.hpp"

#include <algorithm>
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
// Noise level at which plain SSC misclassifies roughly 3% of points at 10%
// corruption on the default synthetic spec.
constexpr double kSweepNoiseScale = 3.0;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Common {
  std::uint64_t seed = 0;
  std::string out = ".";
  unsigned threads = 1;
  bool binary = false;
};

struct SynthFlags {
  dssc::SyntheticSpec spec;
};

struct ClusterFlags {
  std::string data;
  std::string truth;
  int k = 0;
  std::string method = "dssc";
  std::string variant = "tpg";
  std::string normalization = "balanced";
  bool dump_affinity = false;
  bool dump_coefficients = false;
  int restarts = 20;
};

struct SweepFlags {
  std::vector<double> levels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<std::string> methods = {"ssc", "dssc"};
  int restarts = 20;
};

struct EvalFlags {
  std::string predicted;
  std::string truth;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--binary", c.binary, "Write matrices in the SDM1 binary format");
}

void add_spec(CLI::App* sub, dssc::SyntheticSpec& s) {
  sub->add_option("--ambient-dim", s.ambient_dim, "Ambient dimension D")->capture_default_str();
  sub->add_option("--subspaces", s.num_subspaces, "Number of subspaces k")->capture_default_str();
  sub->add_option("--subspace-dim", s.subspace_dim, "Dimension of each subspace")
      ->capture_default_str();
  sub->add_option("--points", s.points_per_subspace, "Points per subspace")
      ->capture_default_str();
  sub->add_option("--noise-scale", s.noise_scale, "Noise variance factor")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void add_solver(CLI::App* sub, std::string& error_norm, dssc::SscConfig& s,
                dssc::DiffusionConfig& d) {
  sub->add_option("--error-norm", error_norm, "Error term: frobenius or l1")
      ->check(CLI::IsMember({"frobenius", "l1"}))
      ->capture_default_str();
  sub->add_option("--alpha", s.sparsity_weight_factor, "Sparsity weight factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--penalty", s.admm_penalty, "ADMM penalty rho")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--admm-iters", s.max_iters, "ADMM iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--admm-tol", s.primal_tol, "ADMM primal and dual tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--steps", d.steps, "Diffusion iterate index t")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--gamma", d.substochastic_scale, "Sub-stochastic scale in (0, 1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--diffusion-tol", d.tol, "Early-stop tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
  return s;
}

// Resolved value of every option of `sub`, as `arg.<name>` entries.
void record_args(const CLI::App* sub, dssc::KeyValueBlock& kv) {
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    std::string value;
    if (opt->get_expected_max() == 0) {
      value = opt->count() > 0 ? "true" : "false";
    } else if (opt->count() > 0) {
      value = join(opt->results());
    } else {
      value = opt->get_default_str();
    }
    kv.set_text("arg." + name, value);
  }
}

dssc::KeyValueBlock manifest_header(const std::string& command, const CLI::App* sub) {
  dssc::KeyValueBlock kv;
  kv.set("command", command.c_str());
  kv.set("version", kVersion);
  record_args(sub, kv);
  return kv;
}

// Rebuilds a command line from a manifest written by any subcommand.
std::vector<std::string> argv_from_manifest(const fs::path& path) {
  const auto kv = dssc::KeyValueBlock::load(path);
  const std::string command = kv.get("command");
  if (command.empty()) throw UsageError("manifest has no command entry");
  std::vector<std::string> args = {"dssc", command};
  for (const auto& [key, value] : kv.entries()) {
    if (key.rfind("arg.", 0) != 0) continue;
    const std::string flag = "--" + key.substr(4);
    if (value == "true") {
      args.push_back(flag);
    } else if (value == "false" || value.empty()) {
      continue;
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw dssc::InputError("cannot create output directory '" + dir + "'");
  return out;
}

dssc::MatrixFormat format_for(bool binary) {
  return binary ? dssc::MatrixFormat::kBinary : dssc::MatrixFormat::kCsv;
}

std::string matrix_name(const std::string& stem, bool binary) {
  return stem + (binary ? ".bin" : ".csv");
}

int run_synth(const CLI::App* sub, const Common& c, SynthFlags& f) {
  f.spec.validate();
  Stopwatch clock;
  const auto ds = dssc::generate_synthetic(f.spec, c.seed);
  const double gen_ms = clock.lap_ms();
  const auto out = prepare_out(c.out);
  dssc::save_matrix(out / matrix_name("X", c.binary), ds.data, format_for(c.binary));
  dssc::save_labels(out / "labels.txt", ds.labels);
  auto kv = manifest_header("synth", sub);
  kv.set("output.data", (out / matrix_name("X", c.binary)).string());
  kv.set("output.labels", (out / "labels.txt").string());
  kv.set("time.generate_ms", gen_ms);
  kv.save(out / "manifest.txt");
  std::cout << "wrote " << ds.data.rows() << "x" << ds.data.cols() << " matrix to "
            << (out / matrix_name("X", c.binary)).string() << '\n';
  return 0;
}

int run_cluster(const CLI::App* sub, const Common& c, ClusterFlags& f,
                dssc::SscConfig ssc, dssc::DiffusionConfig diff) {
  static const std::map<std::string, dssc::DiffusionVariant> variants = {
      {"power", dssc::DiffusionVariant::kPower},
      {"accumulate", dssc::DiffusionVariant::kAccumulate},
      {"pagerank", dssc::DiffusionVariant::kPageRank},
      {"lcdp", dssc::DiffusionVariant::kLcdp},
      {"tpg", dssc::DiffusionVariant::kTpg}};
  diff.variant = variants.at(f.variant);
  diff.normalization = f.normalization == "row"         ? dssc::Normalization::kRow
                       : f.normalization == "symmetric" ? dssc::Normalization::kSymmetric
                                                        : dssc::Normalization::kBalanced;
  ssc.dual_tol = ssc.primal_tol;

  const fs::path data_path(f.data);
  if (!fs::exists(data_path)) throw UsageError("input '" + f.data + "' does not exist");
  Stopwatch clock;
  const dssc::MatrixXd x = dssc::load_matrix(data_path, dssc::format_for_path(data_path));
  const double load_ms = clock.lap_ms();
  if (f.k > x.cols()) throw UsageError("--k exceeds the number of points");

  const auto code = dssc::solve_ssc(x, ssc);
  const double code_ms = clock.lap_ms();
  if (!code.coefficients.allFinite()) {
    std::cerr << "error: sparse coder diverged (converged=false)\n";
    return kExitRuntime;
  }
  const dssc::MatrixXd w = dssc::affinity_from_coefficients(code.coefficients);
  dssc::DiffusionResult<double> diffused;
  const bool use_diffusion = f.method == "dssc";
  if (use_diffusion) diffused = dssc::diffuse_affinity(w, diff);
  const double diff_ms = clock.lap_ms();
  const dssc::MatrixXd& affinity = use_diffusion ? diffused.affinity : w;

  dssc::SpectralConfig sc;
  sc.num_clusters = f.k;
  sc.kmeans_restarts = f.restarts;
  sc.seed = c.seed;
  const auto part = dssc::spectral_cluster(affinity, sc);
  const double spec_ms = clock.lap_ms();

  const auto out = prepare_out(c.out);
  dssc::save_labels(out / "labels.txt", part.labels);
  if (f.dump_affinity) {
    dssc::save_matrix(out / matrix_name("affinity", c.binary), affinity, format_for(c.binary));
  }
  if (f.dump_coefficients) {
    dssc::save_matrix(out / matrix_name("C", c.binary), code.coefficients, format_for(c.binary));
    dssc::save_matrix(out / matrix_name("E", c.binary), code.error, format_for(c.binary));
  }

  dssc::KeyValueBlock diag;
  diag.set("method", f.method.c_str());
  diag.set("points", x.cols());
  diag.set("clusters", f.k);
  diag.set("ssc.converged", code.converged);
  diag.set("ssc.iterations", code.iterations);
  diag.set("ssc.lambda", code.lambda);
  diag.set("ssc.objective", code.objective(ssc.error_norm));
  if (!code.residual_history.empty()) {
    diag.set("ssc.final_primal_residual", code.residual_history.back().primal);
    diag.set("ssc.final_dual_residual", code.residual_history.back().dual);
  }
  if (use_diffusion) {
    diag.set("diffusion.variant", f.variant.c_str());
    diag.set("diffusion.steps_run", diffused.steps_run);
    diag.set("diffusion.final_change", diffused.last_change);
    diag.set("diffusion.converged", diffused.converged);
  }
  diag.set("spectral.isolated_nodes", part.zero_rows.size());
  diag.set("spectral.max_eig_residual", part.max_eig_residual);
  diag.set("spectral.kmeans_inertia", part.inertia);
  if (f.k >= 2) {
    const auto cut = dssc::ncut(affinity, part.labels);
    diag.set("ncut.edge", cut.edge);
    diag.set("ncut.walk", cut.walk);
  }
  if (!f.truth.empty()) {
    const auto truth = dssc::load_labels(f.truth);
    const auto err = dssc::clustering_error(part.labels, truth);
    diag.set("error", err.error);
    if (f.k >= 2) {
      const auto cut = dssc::ncut(affinity, truth);
      diag.set("ncut.truth_edge", cut.edge);
    }
    diag.set("off_block_mass_ratio", dssc::off_block_mass_ratio(affinity, truth));
  }
  diag.save(out / "diagnostics.txt");

  auto kv = manifest_header("cluster", sub);
  kv.set("time.load_ms", load_ms);
  kv.set("time.ssc_ms", code_ms);
  kv.set("time.diffusion_ms", diff_ms);
  kv.set("time.spectral_ms", spec_ms);
  kv.save(out / "manifest.txt");

  if (!code.converged) {
    std::cerr << "warning: ADMM stopped at the iteration cap (converged=false)\n";
  }
  diag.write(std::cout);
  return 0;
}

int run_sweep(const CLI::App* sub, const Common& c, SweepFlags& f,
              dssc::SyntheticSpec spec, dssc::SscConfig ssc, dssc::DiffusionConfig diff) {
  // --seeds "" arrives as one empty token rather than an empty list.
  const auto& seed_tokens = sub->get_option("--seeds")->results();
  const bool blank_seeds =
      !seed_tokens.empty() &&
      std::all_of(seed_tokens.begin(), seed_tokens.end(), [](const auto& t) { return t.empty(); });
  if (f.seeds.empty() || blank_seeds) throw UsageError("--seeds must list at least one seed");
  if (f.levels.empty()) throw UsageError("--levels must list at least one level");
  ssc.dual_tol = ssc.primal_tol;
  dssc::SweepOptions opts;
  opts.ssc = ssc;
  opts.diffusion = diff;
  opts.kmeans_restarts = f.restarts;
  opts.threads = c.threads;
  opts.run_ssc = opts.run_dssc = false;
  for (const auto& m : f.methods) {
    if (m == "ssc") opts.run_ssc = true;
    else if (m == "dssc") opts.run_dssc = true;
    else throw UsageError("unknown method '" + m + "'");
  }
  Stopwatch clock;
  const auto report = dssc::run_corruption_sweep(spec, f.levels, f.seeds, opts);
  const double ms = clock.lap_ms();

  const auto out = prepare_out(c.out);
  {
    std::ofstream csv(out / "sweep.csv", std::ios::binary);
    dssc::write_sweep_csv(csv, report);
    std::ofstream runs(out / "sweep_runs.csv", std::ios::binary);
    dssc::write_sweep_runs_csv(runs, report);
  }
  auto kv = manifest_header("sweep", sub);
  kv.set("time.sweep_ms", ms);
  kv.save(out / "manifest.txt");

  dssc::write_sweep_csv(std::cout, report);
  std::cerr << "std dev (ssc, dssc) per level:";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    std::cerr << ' ' << std::fixed << std::setprecision(4) << report.ssc_std[i] << '/'
              << report.dssc_std[i];
  }
  std::cerr << '\n';
  return 0;
}

int run_eval(const EvalFlags& f) {
  for (const auto& p : {f.predicted, f.truth}) {
    if (!fs::exists(p)) throw UsageError("label file '" + p + "' does not exist");
  }
  const auto pred = dssc::load_labels(f.predicted);
  const auto truth = dssc::load_labels(f.truth);
  const auto err = dssc::clustering_error(pred, truth);
  std::cout << std::fixed << std::setprecision(4) << err.error << '\n';
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() == 3 && args[1] == "--manifest") args = argv_from_manifest(args[2]);
  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());

  CLI::App app{"Sparse subspace clustering with tensor-product-graph diffusion"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer("Replay a run with: dssc --manifest <dir>/manifest.txt");

  Common common;
  SynthFlags synth;
  ClusterFlags cluster;
  SweepFlags sweep;
  EvalFlags eval;
  dssc::SscConfig ssc;
  dssc::DiffusionConfig diff;
  dssc::SyntheticSpec sweep_spec;
  sweep_spec.noise_scale = kSweepNoiseScale;
  std::string error_norm = "frobenius";

  auto* synth_cmd = app.add_subcommand("synth", "Generate a union-of-subspaces dataset");
  add_common(synth_cmd, common);
  add_spec(synth_cmd, synth.spec);
  synth_cmd->add_option("--corruption", synth.spec.corruption_fraction,
                        "Fraction of corrupted columns")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster the columns of a matrix");
  add_common(cluster_cmd, common);
  add_solver(cluster_cmd, error_norm, ssc, diff);
  cluster_cmd->add_option("--data", cluster.data, "Input D x N matrix (.csv or .bin)")
      ->required();
  cluster_cmd->add_option("--k", cluster.k, "Number of clusters")
      ->required()
      ->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--method", cluster.method, "ssc or dssc")
      ->check(CLI::IsMember({"ssc", "dssc"}))
      ->capture_default_str();
  cluster_cmd->add_option("--variant", cluster.variant,
                          "Diffusion: tpg, accumulate, power, pagerank, lcdp")
      ->check(CLI::IsMember({"tpg", "accumulate", "power", "pagerank", "lcdp"}))
      ->capture_default_str();
  cluster_cmd->add_option("--normalization", cluster.normalization,
                          "balanced, symmetric or row")
      ->check(CLI::IsMember({"balanced", "symmetric", "row"}))
      ->capture_default_str();
  cluster_cmd->add_option("--restart-prob", diff.restart_prob, "PageRank walk weight")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cluster_cmd->add_option("--knn", diff.knn, "Neighbourhood size for lcdp")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cluster_cmd->add_option("--restarts", cluster.restarts, "k-means restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cluster_cmd->add_option("--truth", cluster.truth, "Ground-truth labels for diagnostics");
  cluster_cmd->add_flag("--dump-affinity", cluster.dump_affinity, "Write the final affinity");
  cluster_cmd->add_flag("--dump-coefficients", cluster.dump_coefficients,
                        "Write C and E");

  auto* sweep_cmd = app.add_subcommand("sweep", "Corruption sweep, SSC vs DSSC");
  add_common(sweep_cmd, common);
  add_spec(sweep_cmd, sweep_spec);
  add_solver(sweep_cmd, error_norm, ssc, diff);
  sweep_cmd->add_option("--levels", sweep.levels, "Corruption fractions")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per level")
      ->delimiter(',')
      ->expected(1, CLI::detail::expected_max_vector_size)
      ->capture_default_str();
  sweep_cmd->add_option("--methods", sweep.methods, "ssc, dssc or both")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--restarts", sweep.restarts, "k-means restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* eval_cmd = app.add_subcommand("eval", "Clustering error between two label files");
  eval_cmd->add_option("predicted", eval.predicted, "Predicted labels")->required();
  eval_cmd->add_option("truth", eval.truth, "True labels")->required();

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  ssc.error_norm = error_norm == "l1" ? dssc::ErrorNorm::kL1 : dssc::ErrorNorm::kFrobenius;
  try {
    if (*synth_cmd) return run_synth(synth_cmd, common, synth);
    if (*cluster_cmd) return run_cluster(cluster_cmd, common, cluster, ssc, diff);
    if (*sweep_cmd) return run_sweep(sweep_cmd, common, sweep, sweep_spec, ssc, diff);
    if (*eval_cmd) return run_eval(eval);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dssc::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
