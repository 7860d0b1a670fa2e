#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "mfc0/baselines.hpp"
#include "mfc0/clustering.hpp"
#include "mfc0/solver.hpp"

namespace mfc0 {

enum class ErrorKind { None, Corruption, SampleOutlier };

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::None: return "none";
    case ErrorKind::Corruption: return "corruption";
    case ErrorKind::SampleOutlier: return "outlier";
  }
  return "none";
}

struct SynthConfig {
  int K = 5;
  int d0 = 10;
  int D = 100;     // ambient dimension
  int n_k = 100;   // samples per class
  std::uint64_t seed = 0;
  ErrorKind error_kind = ErrorKind::None;
  double error_ratio = 0.0;
  double error_magnitude = 0.0;  // 0 means pick a default from the data
  bool nonneg_shift = false;
};

struct LabeledDataset {
  Matrix Z;
  Matrix clean;
  std::vector<int> truth;
  std::vector<char> column_corrupted;
};

namespace detail {

inline std::vector<int> sample_without_replacement(int n, int count,
                                                   std::mt19937_64& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(count);
  return idx;
}

}  // namespace detail

// Entrywise contamination: a fraction of columns gets 10% of its entries
// bumped by a uniform positive amount. The default magnitude tracks the
// largest entry of the data so the damage is material.
inline void apply_corruption(LabeledDataset& data, double ratio,
                             double magnitude, std::mt19937_64& rng) {
  const int n = static_cast<int>(data.Z.cols());
  const int m = static_cast<int>(data.Z.rows());
  const int n_cols = static_cast<int>(std::lround(ratio * n));
  const int n_entries = std::max(1, static_cast<int>(std::lround(0.1 * m)));
  if (magnitude <= 0.0) magnitude = data.Z.maxCoeff();
  std::uniform_real_distribution<double> bump(0.0, magnitude);

  for (int c : detail::sample_without_replacement(n, n_cols, rng)) {
    for (int r : detail::sample_without_replacement(m, n_entries, rng))
      data.Z(r, c) += bump(rng);
    data.column_corrupted[c] = 1;
  }
}

// Whole-sample contamination: selected columns are pushed far off the union
// of subspaces along a random direction. Displacement lengths follow a
// heavy-tailed (exponential) law scaled by the typical clean column norm, so
// outliers are individually conspicuous rather than uniformly loud.
inline void apply_sample_outliers(LabeledDataset& data, double ratio,
                                  double magnitude, std::mt19937_64& rng) {
  const int n = static_cast<int>(data.Z.cols());
  const int m = static_cast<int>(data.Z.rows());
  const int n_cols = static_cast<int>(std::lround(ratio * n));
  if (magnitude <= 0.0) magnitude = 1.0;

  double mean_norm = 0.0;
  for (int c = 0; c < n; ++c) mean_norm += data.Z.col(c).norm();
  mean_norm /= std::max(n, 1);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::exponential_distribution<double> tail(1.0);
  for (int c : detail::sample_without_replacement(n, n_cols, rng)) {
    Vector dir(m);
    for (int r = 0; r < m; ++r) dir[r] = gauss(rng);
    dir /= std::max(dir.norm(), 1e-30);
    data.Z.col(c) += dir * (magnitude * mean_norm * tail(rng));
    data.column_corrupted[c] = 1;
  }
}

// K subspaces of dimension d0 in R^D, each the image of the previous basis
// under one fixed random rotation-like map; samples are nonnegative mixtures
// of the basis columns. Columns are grouped by class, labels included.
inline LabeledDataset gen_subspaces(const SynthConfig& cfg) {
  if (cfg.K <= 0 || cfg.d0 <= 0 || cfg.D <= 0 || cfg.n_k <= 0)
    throw Error(ErrorCode::BadConfig, "all dataset dimensions must be positive");
  if (cfg.d0 > cfg.D)
    throw Error(ErrorCode::BadConfig, "subspace dimension exceeds ambient dimension");
  if (cfg.error_ratio < 0.0 || cfg.error_ratio > 1.0)
    throw Error(ErrorCode::BadConfig, "error ratio must lie in [0, 1]");

  auto rng = make_rng(cfg.seed);
  Matrix T = orthonormalize(uniform_matrix(cfg.D, cfg.D, rng));
  Matrix U = orthonormalize(uniform_matrix(cfg.D, cfg.d0, rng));

  LabeledDataset data;
  data.Z.resize(cfg.D, cfg.K * cfg.n_k);
  data.truth.resize(cfg.K * cfg.n_k);
  for (int k = 0; k < cfg.K; ++k) {
    if (k > 0) U = T * U;
    Matrix R = uniform_matrix(cfg.d0, cfg.n_k, rng);
    data.Z.middleCols(k * cfg.n_k, cfg.n_k) = U * R;
    std::fill(data.truth.begin() + k * cfg.n_k,
              data.truth.begin() + (k + 1) * cfg.n_k, k);
  }
  if (cfg.nonneg_shift) {
    const double lo = data.Z.minCoeff();
    if (lo < 0.0) data.Z.array() -= lo;
  }

  data.clean = data.Z;
  data.column_corrupted.assign(data.Z.cols(), 0);
  if (cfg.error_kind != ErrorKind::None && cfg.error_ratio > 0.0) {
    // A separate stream keeps the clean part identical across error settings.
    auto err_rng = make_rng(cfg.seed + 50);
    if (cfg.error_kind == ErrorKind::Corruption)
      apply_corruption(data, cfg.error_ratio, cfg.error_magnitude, err_rng);
    else
      apply_sample_outliers(data, cfg.error_ratio, cfg.error_magnitude, err_rng);
  }
  return data;
}

// Three lines through the origin in R^3 at 60 degrees pairwise, roughly 50
// samples per line with coefficients bounded away from zero.
inline LabeledDataset gen_toy3d(std::uint64_t seed,
                                ErrorKind kind = ErrorKind::None,
                                double ratio = 0.0, double magnitude = 0.0,
                                int n_k = 50) {
  const double h = std::sqrt(0.5);
  Matrix dirs(3, 3);
  dirs.col(0) << 0.0, h, h;
  dirs.col(1) << h, 0.0, h;
  dirs.col(2) << h, h, 0.0;

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> coeff(0.1, 1.0);
  LabeledDataset data;
  data.Z.resize(3, 3 * n_k);
  data.truth.resize(3 * n_k);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < n_k; ++j) {
      data.Z.col(k * n_k + j) = dirs.col(k) * coeff(rng);
      data.truth[k * n_k + j] = k;
    }
  }
  data.clean = data.Z;
  data.column_corrupted.assign(data.Z.cols(), 0);
  if (kind != ErrorKind::None && ratio > 0.0) {
    auto err_rng = make_rng(seed + 50);
    if (kind == ErrorKind::Corruption)
      apply_corruption(data, ratio, magnitude, err_rng);
    else
      apply_sample_outliers(data, ratio, magnitude, err_rng);
  }
  return data;
}

// Acute angle between two lines (sign of the direction vectors is ignored).
inline double subspace_angle(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na < 1e-30 || nb < 1e-30)
    throw Error(ErrorCode::BadConfig, "zero vector has no direction");
  const double c = std::clamp(std::abs(a.dot(b)) / (na * nb), 0.0, 1.0);
  return std::acos(c);
}

// Intrinsic dimension of one class: how many singular values stay above a
// fraction of the largest one.
inline int estimate_d0(const Matrix& Z_class, double tau = 0.05) {
  if (Z_class.size() == 0) throw Error(ErrorCode::BadConfig, "empty class block");
  SvdTriple svd = thin_svd(Z_class);
  const double top = svd.Sigma[0];
  if (top <= 0.0) return 0;
  int count = 0;
  for (int j = 0; j < svd.Sigma.size(); ++j)
    if (svd.Sigma[j] >= tau * top) ++count;
  return count;
}

// Median of the per-class estimates, robust to one miscounted class.
inline int estimate_d0_median(const Matrix& Z, const std::vector<int>& truth,
                              int K, double tau = 0.05) {
  if (static_cast<int>(truth.size()) != Z.cols())
    throw Error(ErrorCode::LengthMismatch, "one label per column required");
  std::vector<int> estimates;
  for (int k = 0; k < K; ++k) {
    std::vector<int> cols;
    for (int c = 0; c < Z.cols(); ++c)
      if (truth[c] == k) cols.push_back(c);
    if (cols.empty()) continue;
    Matrix block(Z.rows(), static_cast<int>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j)
      block.col(static_cast<int>(j)) = Z.col(cols[j]);
    estimates.push_back(estimate_d0(block, tau));
  }
  if (estimates.empty()) throw Error(ErrorCode::BadConfig, "no classes present");
  std::sort(estimates.begin(), estimates.end());
  return estimates[estimates.size() / 2];
}

struct SweepRow {
  std::string kind;
  double ratio = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  double acc = 0.0;
  int iters = 0;
  double seconds = 0.0;
};

namespace detail {

inline SweepRow mfc0_cell(const LabeledDataset& data, const SynthConfig& cfg,
                          ErrorKind kind, double lambda) {
  SolverConfig solver_cfg;
  solver_cfg.lambda = lambda;
  solver_cfg.seed = cfg.seed;
  solver_cfg.error_norm = kind == ErrorKind::Corruption  ? ErrorNorm::L1
                          : kind == ErrorKind::SampleOutlier ? ErrorNorm::L21
                                                             : ErrorNorm::None;
  ValidationOptions opts;
  opts.allow_negative = true;
  Problem p = validate_problem(data.Z, SubspaceSpec{cfg.K, cfg.d0}, solver_cfg, opts);
  FitResult fitres = fit(p);
  auto labels = normalized_cut(affinity(fitres.Y), cfg.K, cfg.seed);

  SweepRow row;
  row.method = "mfc0";
  row.acc = accuracy(labels, data.truth);
  row.iters = fitres.iterations;
  row.seconds = fitres.elapsed_seconds;
  return row;
}

inline SweepRow pca_cell(const LabeledDataset& data, const SynthConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  BaselineModel m = pca_fit(data.Z);
  auto labels = baseline_cluster(m, cfg.K, cfg.seed);
  const auto t1 = std::chrono::steady_clock::now();

  SweepRow row;
  row.method = "pca";
  row.acc = accuracy(labels, data.truth);
  row.iters = 0;
  row.seconds = std::chrono::duration<double>(t1 - t0).count();
  return row;
}

inline SweepRow nmf_cell(const LabeledDataset& data, const SynthConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Matrix Z = data.Z;
  const double lo = Z.minCoeff();
  if (lo < 0.0) Z.array() -= lo;  // factorization needs nonnegative input
  BaselineModel m = nmf_fit(Z, cfg.K * cfg.d0, 200, cfg.seed);
  auto labels = baseline_cluster(m, cfg.K, cfg.seed);
  const auto t1 = std::chrono::steady_clock::now();

  SweepRow row;
  row.method = "nmf";
  row.acc = accuracy(labels, data.truth);
  row.iters = static_cast<int>(m.objective_trace.size()) - 1;
  row.seconds = std::chrono::duration<double>(t1 - t0).count();
  return row;
}

}  // namespace detail

// Accuracy of the selected methods across contamination levels and seeds.
// One row per (ratio, method, seed) cell, sorted by that key.
inline std::vector<SweepRow> sweep_error_ratio(
    ErrorKind kind, const std::vector<double>& ratios, int num_seeds,
    const SynthConfig& base, double lambda = 1.0,
    const std::vector<std::string>& methods = {"mfc0", "pca", "nmf"}) {
  if (num_seeds <= 0) throw Error(ErrorCode::BadConfig, "need at least one seed");
  const auto wants = [&](const char* name) {
    return std::find(methods.begin(), methods.end(), name) != methods.end();
  };
  for (const std::string& m : methods)
    if (m != "mfc0" && m != "pca" && m != "nmf")
      throw Error(ErrorCode::BadConfig, "unknown sweep method: " + m);

  std::vector<SweepRow> rows;
  for (double ratio : ratios) {
    for (int s = 0; s < num_seeds; ++s) {
      SynthConfig cfg = base;
      cfg.seed = static_cast<std::uint64_t>(s);
      cfg.error_kind = kind;
      cfg.error_ratio = ratio;
      LabeledDataset data = gen_subspaces(cfg);
      std::vector<SweepRow> cell;
      if (wants("mfc0")) cell.push_back(detail::mfc0_cell(data, cfg, kind, lambda));
      if (wants("pca")) cell.push_back(detail::pca_cell(data, cfg));
      if (wants("nmf")) cell.push_back(detail::nmf_cell(data, cfg));
      for (SweepRow& row : cell) {
        row.kind = error_kind_name(kind);
        row.ratio = ratio;
        row.seed = cfg.seed;
        rows.push_back(std::move(row));
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     return std::tie(a.kind, a.ratio, a.method, a.seed) <
                            std::tie(b.kind, b.ratio, b.method, b.seed);
                   });
  return rows;
}

struct TimingRow {
  int n = 0;
  int iters = 0;
  double seconds = 0.0;
};

struct TimingProfile {
  std::vector<TimingRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

namespace detail {

inline void linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                       double& slope, double& intercept, double& r2) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  slope = sxy / sxx;
  intercept = my - slope * mx;
  r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
}

}  // namespace detail

// Wall time for a fixed iteration budget as the sample count grows, with a
// least-squares line through (n, seconds). The iteration count is pinned and
// the convergence test disabled so every size does identical work per column.
inline TimingProfile timing_profile(const std::vector<int>& sample_counts,
                                    int iters = 30, std::uint64_t seed = 0,
                                    int m = 100, int d0 = 10, int K = 5) {
  if (sample_counts.size() < 2)
    throw Error(ErrorCode::BadConfig, "need at least two sizes to fit a line");
  TimingProfile profile;
  std::vector<double> xs, ys;
  for (int n : sample_counts) {
    SynthConfig cfg;
    cfg.K = K;
    cfg.d0 = d0;
    cfg.D = m;
    if (n <= 0 || n % cfg.K != 0)
      throw Error(ErrorCode::BadConfig,
                  "sample counts must be positive multiples of the class count");
    cfg.n_k = n / cfg.K;
    cfg.seed = seed;
    LabeledDataset data = gen_subspaces(cfg);

    SolverConfig solver_cfg;
    solver_cfg.max_iters = iters;
    solver_cfg.epsilon = 1e-300;  // unreachable: every size runs all iterations
    solver_cfg.seed = seed;
    ValidationOptions opts;
    opts.allow_negative = true;
    Problem p =
        validate_problem(data.Z, SubspaceSpec{cfg.K, cfg.d0}, solver_cfg, opts);
    FitResult fitres = fit(p);

    TimingRow row;
    row.n = n;
    row.iters = fitres.iterations;
    row.seconds = fitres.elapsed_seconds;
    profile.rows.push_back(row);
    xs.push_back(static_cast<double>(n));
    ys.push_back(row.seconds);
  }
  detail::linear_fit(xs, ys, profile.slope, profile.intercept, profile.r_squared);
  return profile;
}

}  // namespace mfc0
