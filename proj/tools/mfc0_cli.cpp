// Command-line front end: fit, cluster, synth, sweep, timing.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfc0/bench.hpp"
#include "mfc0/io.hpp"

namespace fs = std::filesystem;
using namespace mfc0;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitUsage = 2;
constexpr int kExitNonFinite = 3;

struct FitArgs {
  std::string input;
  std::string out_dir;
  int K = 0;
  int d0 = 0;
  double lambda = 1.0;
  std::string error_norm = "none";
  std::string y_update = "exact";
  double epsilon = 1e-4;
  int max_iters = 1000;
  std::uint64_t seed = 0;
  std::string beta_policy = "tied";
  double beta = 1.0;
  bool min_shift = false;
  bool allow_negative = false;
};

ErrorNorm parse_error_norm(const std::string& s) {
  if (s == "none") return ErrorNorm::None;
  if (s == "l1") return ErrorNorm::L1;
  if (s == "l21") return ErrorNorm::L21;
  throw Error(ErrorCode::BadConfig, "unknown error norm: " + s);
}

ErrorKind parse_error_kind(const std::string& s) {
  if (s == "none") return ErrorKind::None;
  if (s == "corruption") return ErrorKind::Corruption;
  if (s == "outlier") return ErrorKind::SampleOutlier;
  throw Error(ErrorCode::BadConfig, "unknown error kind: " + s);
}

// Accepts either a comma list ("0,0.3,0.6") or an inclusive colon range
// ("0:0.6:0.1").
std::vector<double> parse_ratio_list(const std::string& text) {
  std::vector<double> out;
  try {
    if (text.find(':') != std::string::npos) {
      double bounds[3];
      std::size_t start = 0;
      for (int i = 0; i < 3; ++i) {
        const std::size_t stop = text.find(':', start);
        if ((i < 2) == (stop == std::string::npos))
          throw Error(ErrorCode::BadConfig, "range must be start:stop:step");
        bounds[i] = std::stod(text.substr(start, stop - start));
        start = stop + 1;
      }
      if (bounds[2] <= 0.0 || bounds[1] < bounds[0])
        throw Error(ErrorCode::BadConfig, "range must be start:stop:step with step > 0");
      for (int i = 0;; ++i) {
        const double v = bounds[0] + i * bounds[2];
        if (v > bounds[1] + 1e-9) break;
        out.push_back(v);
      }
    } else {
      std::size_t start = 0;
      while (start <= text.size()) {
        std::size_t stop = text.find(',', start);
        if (stop == std::string::npos) stop = text.size();
        out.push_back(std::stod(text.substr(start, stop - start)));
        start = stop + 1;
      }
    }
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::BadConfig, "cannot parse ratio list: " + text);
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::BadConfig, "ratio out of range in: " + text);
  }
  if (out.empty()) throw Error(ErrorCode::BadConfig, "empty ratio list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  try {
    while (start <= text.size()) {
      std::size_t stop = text.find(',', start);
      if (stop == std::string::npos) stop = text.size();
      out.push_back(std::stoi(text.substr(start, stop - start)));
      start = stop + 1;
    }
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadConfig, "cannot parse integer list: " + text);
  }
  return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t stop = text.find(',', start);
    if (stop == std::string::npos) stop = text.size();
    if (stop > start) out.push_back(text.substr(start, stop - start));
    start = stop + 1;
  }
  if (out.empty()) throw Error(ErrorCode::BadConfig, "empty method list");
  return out;
}

Matrix labels_to_matrix(const std::vector<int>& labels) {
  Matrix M(static_cast<int>(labels.size()), 1);
  for (std::size_t i = 0; i < labels.size(); ++i)
    M(static_cast<int>(i), 0) = labels[i];
  return M;
}

std::vector<int> matrix_to_labels(const Matrix& M) {
  if (M.rows() != 1 && M.cols() != 1)
    throw Error(ErrorCode::ParseError, "labels file must be a single row or column");
  std::vector<int> labels(static_cast<std::size_t>(M.size()));
  for (int i = 0; i < M.size(); ++i) {
    const double v = M(i);
    if (v != std::floor(v) || v < 0)
      throw Error(ErrorCode::ParseError, "labels must be nonnegative integers");
    labels[static_cast<std::size_t>(i)] = static_cast<int>(v);
  }
  return labels;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Collects metadata and produced files so the manifest can record the fully
// resolved run (config, input hashes, output hashes) in order.
class RunWriter {
 public:
  RunWriter(std::string dir, std::string command)
      : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    meta("tool", "mfc0");
    meta("version", kVersion);
    meta("command", command);
    meta("created", iso_utc_now());
  }

  void meta(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
  }

  void input_file(const std::string& path, const std::string& bytes) {
    meta("input", path);
    meta("input.hash", git_blob_hash(bytes));
  }

  void matrix(const std::string& name, const Matrix& M,
              const std::vector<std::string>& banner) {
    raw(name, format_matrix_csv(M, banner));
  }

  void pgm(const std::string& name, const Matrix& M) {
    write_pgm(path(name), M);
    entries_.emplace_back(name, git_blob_hash(read_file_bytes(path(name))));
  }

  void raw(const std::string& name, const std::string& bytes) {
    const fs::path full = path(name);
    if (full.has_parent_path()) fs::create_directories(full.parent_path());
    write_file_bytes(full.string(), bytes);
    entries_.emplace_back(name, git_blob_hash(bytes));
  }

  void finish() { write_manifest(path("run.manifest"), entries_); }

  std::string path(const std::string& name) const {
    return (fs::path(dir_) / name).string();
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct LoadedProblem {
  Problem problem;
  std::string input_bytes;
  double shift = 0.0;
};

LoadedProblem load_problem(const FitArgs& args) {
  std::string bytes = read_file_bytes(args.input);
  Matrix Z = parse_matrix_csv(bytes);
  double shift = 0.0;
  if (args.min_shift) {
    const double lo = Z.minCoeff();
    if (lo < 0.0) {
      shift = -lo;
      Z.array() += shift;
    }
  }
  SolverConfig cfg;
  cfg.lambda = args.lambda;
  cfg.error_norm = parse_error_norm(args.error_norm);
  cfg.epsilon = args.epsilon;
  cfg.max_iters = args.max_iters;
  cfg.seed = args.seed;
  cfg.y_update = args.y_update == "paper" ? YUpdateRule::PaperLiteral
                                          : YUpdateRule::ExactStationarity;
  cfg.beta_policy =
      args.beta_policy == "fixed" ? BetaPolicy::Fixed : BetaPolicy::TiedToMu;
  cfg.beta_fixed = args.beta;
  ValidationOptions opts;
  opts.allow_negative = args.allow_negative;
  return LoadedProblem{
      validate_problem(Z, SubspaceSpec{args.K, args.d0}, cfg, opts),
      std::move(bytes), shift};
}

// Every default materialized, so a manifest alone pins the run.
void record_config(RunWriter& out, const FitArgs& args, double shift) {
  out.meta("config.k", std::to_string(args.K));
  out.meta("config.d0", std::to_string(args.d0));
  out.meta("config.lambda", fmt_double(args.lambda));
  out.meta("config.error_norm", args.error_norm);
  out.meta("config.y_update", args.y_update);
  out.meta("config.epsilon", fmt_double(args.epsilon));
  out.meta("config.max_iters", std::to_string(args.max_iters));
  out.meta("config.seed", std::to_string(args.seed));
  out.meta("config.beta_policy", args.beta_policy);
  if (args.beta_policy == "fixed") out.meta("config.beta", fmt_double(args.beta));
  out.meta("config.mu0", fmt_double(SolverConfig{}.mu0));
  out.meta("config.rho", fmt_double(SolverConfig{}.rho));
  out.meta("config.mu_max", fmt_double(SolverConfig{}.mu_max));
  out.meta("config.min_shift", args.min_shift ? "true" : "false");
  out.meta("config.applied_shift", fmt_double(shift));
  out.meta("config.allow_negative", args.allow_negative ? "true" : "false");
}

void write_fit_outputs(RunWriter& out, const FitResult& result) {
  out.meta("converged", result.converged ? "true" : "false");
  out.meta("iterations", std::to_string(result.iterations));
  out.meta("objective", fmt_double(result.objective_trace.back().total));
  out.meta("seconds", fmt_double(result.elapsed_seconds));
  out.matrix("X.csv", result.X, {"learned dictionary, one basis vector per column"});
  out.matrix("Y.csv", result.Y, {"representation, one sample per column"});
  out.matrix("E.csv", result.E, {"separated errors"});
  Matrix trace(static_cast<int>(result.objective_trace.size()), 4);
  for (int i = 0; i < trace.rows(); ++i) {
    const Objective& o = result.objective_trace[static_cast<std::size_t>(i)];
    trace(i, 0) = i + 1;
    trace(i, 1) = o.total;
    trace(i, 2) = o.fit_term;
    trace(i, 3) = o.reg_term;
  }
  out.matrix("objective.csv", trace, {"columns: iter, total, fit_term, reg_term"});
}

void print_fit_summary(const FitResult& result) {
  std::printf("iterations=%d converged=%s objective=%.6g seconds=%.3f\n",
              result.iterations, result.converged ? "true" : "false",
              result.objective_trace.back().total, result.elapsed_seconds);
}

int cmd_fit(const FitArgs& args) {
  LoadedProblem loaded = load_problem(args);
  FitResult result = fit(loaded.problem);
  RunWriter out(args.out_dir, "fit");
  out.input_file(args.input, loaded.input_bytes);
  record_config(out, args, loaded.shift);
  write_fit_outputs(out, result);
  out.finish();
  print_fit_summary(result);
  return 0;
}

int cmd_cluster(const FitArgs& args, std::uint64_t cluster_seed,
                const std::string& truth_path) {
  LoadedProblem loaded = load_problem(args);
  FitResult result = fit(loaded.problem);
  auto labels = normalized_cut(affinity(result.Y), args.K, cluster_seed);
  BlockView view = block_view(result.Y, labels);
  const double offblock = offblock_relative_mass(result.Y, labels);

  RunWriter out(args.out_dir, "cluster");
  out.input_file(args.input, loaded.input_bytes);
  record_config(out, args, loaded.shift);
  out.meta("config.cluster_seed", std::to_string(cluster_seed));
  write_fit_outputs(out, result);
  out.matrix("labels.csv", labels_to_matrix(labels), {"cluster label per sample"});
  out.pgm("Y_block.pgm", view.permuted);
  ExtractedBases bases = extract_bases(result.X, view.row_assignment, args.K);
  for (int k = 0; k < args.K; ++k)
    out.matrix("bases/basis_" + std::to_string(k) + ".csv", bases.bases[k],
               {"basis vectors owned by class " + std::to_string(k)});
  out.meta("bases.balanced", bases.balanced ? "true" : "false");
  out.meta("offblock_mass", fmt_double(offblock));

  double acc = -1.0;
  if (!truth_path.empty()) {
    auto truth = matrix_to_labels(read_matrix_csv(truth_path));
    acc = accuracy(labels, truth);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f\n", acc);
    out.raw("accuracy.txt", buf);
  }
  out.finish();

  print_fit_summary(result);
  std::printf("offblock_mass=%.6f\n", offblock);
  if (acc >= 0.0) std::printf("acc=%.6f\n", acc);
  return 0;
}

int cmd_synth(const std::string& preset, SynthConfig cfg, const std::string& err_kind,
              double ratio, double magnitude, const std::string& out_dir) {
  cfg.error_kind = parse_error_kind(err_kind);
  cfg.error_ratio = ratio;
  cfg.error_magnitude = magnitude;

  LabeledDataset data;
  if (preset == "highdim") {
    data = gen_subspaces(cfg);
  } else if (preset == "toy3d") {
    data = gen_toy3d(cfg.seed, cfg.error_kind, cfg.error_ratio,
                     cfg.error_magnitude, cfg.n_k);
  } else {
    throw Error(ErrorCode::BadConfig, "unknown preset: " + preset);
  }

  RunWriter out(out_dir, "synth");
  out.meta("config.preset", preset);
  if (preset == "highdim") {
    out.meta("config.k", std::to_string(cfg.K));
    out.meta("config.d0", std::to_string(cfg.d0));
    out.meta("config.ambient_dim", std::to_string(cfg.D));
  }
  out.meta("config.n_k", std::to_string(cfg.n_k));
  out.meta("config.seed", std::to_string(cfg.seed));
  out.meta("config.error_kind", err_kind);
  out.meta("config.ratio", fmt_double(ratio));
  out.meta("config.magnitude", fmt_double(magnitude));
  out.meta("config.shift", cfg.nonneg_shift ? "true" : "false");
  out.matrix("Z.csv", data.Z, {"data matrix, one sample per column"});
  out.matrix("clean.csv", data.clean, {"uncontaminated reference"});
  out.matrix("labels.csv", labels_to_matrix(data.truth), {"class label per sample"});
  Matrix mask(static_cast<int>(data.column_corrupted.size()), 1);
  for (std::size_t i = 0; i < data.column_corrupted.size(); ++i)
    mask(static_cast<int>(i), 0) = data.column_corrupted[i];
  out.matrix("mask.csv", mask, {"1 where the column was contaminated"});
  out.finish();

  std::printf("rows=%d cols=%d corrupted=%d\n", (int)data.Z.rows(),
              (int)data.Z.cols(),
              (int)std::count(data.column_corrupted.begin(),
                              data.column_corrupted.end(), 1));
  return 0;
}

int cmd_sweep(const std::string& kind, const std::string& ratios,
              const std::string& methods, int seeds, double lambda,
              const SynthConfig& base, const std::string& out_dir) {
  const ErrorKind parsed_kind = parse_error_kind(kind);
  if (parsed_kind == ErrorKind::None)
    throw Error(ErrorCode::BadConfig, "sweep needs an error kind of corruption or outlier");
  auto rows = sweep_error_ratio(parsed_kind, parse_ratio_list(ratios), seeds,
                                base, lambda, parse_name_list(methods));

  std::string csv = "kind,ratio,method,seed,acc,iters,seconds\n";
  char line[256];
  for (const SweepRow& row : rows) {
    std::snprintf(line, sizeof line, "%s,%g,%s,%llu,%.6f,%d,%.6f\n",
                  row.kind.c_str(), row.ratio, row.method.c_str(),
                  static_cast<unsigned long long>(row.seed), row.acc, row.iters,
                  row.seconds);
    csv += line;
  }

  // Aggregate over seeds per (ratio, method); rows are already sorted so
  // cells are contiguous.
  std::string means = "kind,ratio,method,mean_acc,mean_iters,mean_seconds\n";
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    double acc = 0.0, secs = 0.0, iters = 0.0;
    while (j < rows.size() && rows[j].ratio == rows[i].ratio &&
           rows[j].method == rows[i].method) {
      acc += rows[j].acc;
      iters += rows[j].iters;
      secs += rows[j].seconds;
      ++j;
    }
    const double count = static_cast<double>(j - i);
    std::snprintf(line, sizeof line, "%s,%g,%s,%.6f,%.1f,%.6f\n",
                  rows[i].kind.c_str(), rows[i].ratio, rows[i].method.c_str(),
                  acc / count, iters / count, secs / count);
    means += line;
    i = j;
  }

  RunWriter out(out_dir, "sweep");
  out.meta("config.kind", kind);
  out.meta("config.ratios", ratios);
  out.meta("config.methods", methods);
  out.meta("config.seeds", std::to_string(seeds));
  out.meta("config.lambda", fmt_double(lambda));
  out.meta("config.k", std::to_string(base.K));
  out.meta("config.d0", std::to_string(base.d0));
  out.meta("config.ambient_dim", std::to_string(base.D));
  out.meta("config.n_k", std::to_string(base.n_k));
  out.raw("sweep.csv", csv);
  out.raw("sweep_means.csv", means);
  out.finish();
  std::printf("wrote %zu rows to %s\n", rows.size(),
              out.path("sweep.csv").c_str());
  return 0;
}

int cmd_timing(const std::string& sizes, int iters, std::uint64_t seed, int m,
               int d0, int K, const std::string& out_dir) {
  TimingProfile profile = timing_profile(parse_int_list(sizes), iters, seed, m, d0, K);
  std::string csv = "n,iters,total_s,per_iter_s\n";
  char line[128];
  for (const TimingRow& row : profile.rows) {
    std::snprintf(line, sizeof line, "%d,%d,%.6f,%.8f\n", row.n, row.iters,
                  row.seconds, row.seconds / row.iters);
    csv += line;
  }

  RunWriter out(out_dir, "timing");
  out.meta("config.sizes", sizes);
  out.meta("config.iters", std::to_string(iters));
  out.meta("config.seed", std::to_string(seed));
  out.meta("config.m", std::to_string(m));
  out.meta("config.d0", std::to_string(d0));
  out.meta("config.k", std::to_string(K));
  out.raw("timing.csv", csv);
  out.meta("fit.slope", fmt_double(profile.slope));
  out.meta("fit.intercept", fmt_double(profile.intercept));
  out.meta("fit.r_squared", fmt_double(profile.r_squared));
  out.finish();
  std::printf("slope=%.3e intercept=%.3e r_squared=%.4f\n", profile.slope,
              profile.intercept, profile.r_squared);
  return 0;
}

void add_fit_options(CLI::App* cmd, FitArgs& args) {
  cmd->add_option("--input", args.input, "matrix CSV, one sample per column")
      ->required();
  cmd->add_option("--k,--K", args.K, "number of classes")->required();
  cmd->add_option("--d0", args.d0, "dimension per class")->required();
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_option("--lambda", args.lambda, "error penalty weight");
  cmd->add_option("--error-norm", args.error_norm, "none, l1 or l21")
      ->check(CLI::IsMember({"none", "l1", "l21"}));
  cmd->add_option("--y-update", args.y_update, "exact or paper")
      ->check(CLI::IsMember({"exact", "paper"}));
  cmd->add_option("--epsilon", args.epsilon, "convergence tolerance");
  cmd->add_option("--max-iters", args.max_iters, "iteration cap");
  cmd->add_option("--seed", args.seed, "rng seed for the initial dictionary");
  cmd->add_option("--beta-policy", args.beta_policy,
                  "tied (follow the multiplier step) or fixed")
      ->check(CLI::IsMember({"tied", "fixed"}));
  cmd->add_option("--beta", args.beta, "penalty weight when --beta-policy=fixed");
  cmd->add_flag("--min-shift", args.min_shift,
                "shift the data so its smallest entry is zero");
  cmd->add_flag("--allow-negative", args.allow_negative,
                "accept signed input instead of rejecting it");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthonormal dictionaries with column-sparse nonnegative "
               "representations, plus clustering and benchmarks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "factorize a data matrix");
  add_fit_options(fit_cmd, fit_args);

  FitArgs cluster_args;
  std::uint64_t cluster_seed = 0;
  std::string truth_path;
  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "factorize, then segment the samples");
  add_fit_options(cluster_cmd, cluster_args);
  cluster_cmd->add_option("--cluster-seed", cluster_seed, "rng seed for k-means");
  cluster_cmd->add_option("--truth", truth_path,
                          "labels CSV; writes accuracy.txt when given");

  std::string synth_preset = "highdim";
  SynthConfig synth_cfg;
  std::string synth_err = "none";
  double synth_ratio = 0.0, synth_mag = 0.0;
  std::string synth_out;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a labeled dataset");
  synth_cmd->add_option("--preset", synth_preset, "highdim or toy3d")
      ->check(CLI::IsMember({"highdim", "toy3d"}));
  synth_cmd->add_option("--k,--K", synth_cfg.K, "number of classes (highdim)");
  synth_cmd->add_option("--d0", synth_cfg.d0, "dimension per class (highdim)");
  synth_cmd->add_option("--D", synth_cfg.D, "ambient dimension (highdim)");
  synth_cmd->add_option("--n-k", synth_cfg.n_k, "samples per class");
  synth_cmd->add_option("--seed", synth_cfg.seed, "rng seed");
  synth_cmd->add_option("--error-kind", synth_err, "none, corruption or outlier")
      ->check(CLI::IsMember({"none", "corruption", "outlier"}));
  synth_cmd->add_option("--ratio", synth_ratio, "fraction of contaminated columns");
  synth_cmd->add_option("--magnitude", synth_mag,
                        "contamination strength; 0 picks a default");
  synth_cmd->add_flag("--shift", synth_cfg.nonneg_shift,
                      "shift the clean data to be nonnegative");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  std::string sweep_kind = "corruption";
  std::string sweep_ratios = "0:0.6:0.1";
  std::string sweep_methods = "mfc0,pca,nmf";
  int sweep_seeds = 5;
  double sweep_lambda = 1.0;
  SynthConfig sweep_cfg;
  std::string sweep_out;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "accuracy vs contamination for several methods");
  sweep_cmd->add_option("--kind", sweep_kind, "corruption or outlier")
      ->check(CLI::IsMember({"corruption", "outlier"}));
  sweep_cmd->add_option("--ratios", sweep_ratios,
                        "comma list or start:stop:step range");
  sweep_cmd->add_option("--methods", sweep_methods,
                        "comma subset of mfc0,pca,nmf");
  sweep_cmd->add_option("--seeds", sweep_seeds, "seeds per cell");
  sweep_cmd->add_option("--lambda", sweep_lambda, "solver error penalty");
  sweep_cmd->add_option("--k,--K", sweep_cfg.K, "number of classes");
  sweep_cmd->add_option("--d0", sweep_cfg.d0, "dimension per class");
  sweep_cmd->add_option("--D", sweep_cfg.D, "ambient dimension");
  sweep_cmd->add_option("--n-k", sweep_cfg.n_k, "samples per class");
  sweep_cmd->add_option("--out", sweep_out, "output directory")->required();

  std::string timing_sizes = "250,500,1000,2000";
  int timing_iters = 30;
  std::uint64_t timing_seed = 0;
  int timing_m = 100, timing_d0 = 10, timing_k = 5;
  std::string timing_out;
  CLI::App* timing_cmd =
      app.add_subcommand("timing", "wall time vs sample count");
  timing_cmd->add_option("--n", timing_sizes, "comma list of sample counts");
  timing_cmd->add_option("--m", timing_m, "ambient dimension");
  timing_cmd->add_option("--d0", timing_d0, "dimension per class");
  timing_cmd->add_option("--k,--K", timing_k, "number of classes");
  timing_cmd->add_option("--iters", timing_iters, "iterations per run");
  timing_cmd->add_option("--seed", timing_seed, "rng seed");
  timing_cmd->add_option("--out", timing_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_args);
    if (cluster_cmd->parsed())
      return cmd_cluster(cluster_args, cluster_seed, truth_path);
    if (synth_cmd->parsed()) {
      if (synth_preset == "toy3d" && synth_cmd->count("--n-k") == 0)
        synth_cfg.n_k = 50;
      return cmd_synth(synth_preset, synth_cfg, synth_err, synth_ratio,
                       synth_mag, synth_out);
    }
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_kind, sweep_ratios, sweep_methods, sweep_seeds,
                       sweep_lambda, sweep_cfg, sweep_out);
    if (timing_cmd->parsed())
      return cmd_timing(timing_sizes, timing_iters, timing_seed, timing_m,
                        timing_d0, timing_k, timing_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::NonFinite ? kExitNonFinite : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
