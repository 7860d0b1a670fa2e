#pragma once

#include <string>
#include <vector>

#include "mfc0/kmeans.hpp"
#include "mfc0/operators.hpp"

namespace mfc0 {

struct BaselineModel {
  std::string kind;  // "pca" or "nmf"
  Matrix basis;      // m x r
  Matrix coeffs;     // r x n, one column per sample
  double variance_kept = 0.0;
  std::vector<double> objective_trace;
};

// Mean-centered principal components keeping the smallest rank that explains
// the requested fraction of variance.
inline BaselineModel pca_fit(const Matrix& Z, double variance = 0.95) {
  if (Z.size() == 0) throw Error(ErrorCode::BadConfig, "empty input");
  if (!(variance > 0.0 && variance <= 1.0))
    throw Error(ErrorCode::BadConfig, "variance target must lie in (0, 1]");
  if (!all_finite(Z)) throw Error(ErrorCode::NonFinite, "input contains non-finite entries");

  Vector mean = Z.rowwise().mean();
  Matrix centered = Z.colwise() - mean;
  SvdTriple svd = thin_svd(centered);

  const double total = svd.Sigma.array().square().sum();
  int r = 0;
  double kept = 0.0;
  if (total <= 0.0) {
    r = 1;  // constant data: keep one (arbitrary) direction
    kept = 1.0;
  } else {
    double acc = 0.0;
    for (int j = 0; j < svd.Sigma.size(); ++j) {
      acc += svd.Sigma[j] * svd.Sigma[j];
      r = j + 1;
      kept = acc / total;
      if (kept >= variance) break;
    }
  }

  BaselineModel model;
  model.kind = "pca";
  model.basis = svd.Lfac.leftCols(r);
  model.coeffs = model.basis.transpose() * centered;
  model.variance_kept = kept;
  return model;
}

// Multiplicative-update nonnegative factorization under the Frobenius
// objective. Stops early once the relative objective change drops below 1e-5.
inline BaselineModel nmf_fit(const Matrix& Z, int r, int max_iters = 200,
                             std::uint64_t seed = 0) {
  if (Z.size() == 0 || r <= 0 || r > std::min(Z.rows(), Z.cols()))
    throw Error(ErrorCode::BadConfig, "rank must satisfy 0 < r <= min(m, n)");
  if (!all_finite(Z)) throw Error(ErrorCode::NonFinite, "input contains non-finite entries");
  if (Z.minCoeff() < 0.0)
    throw Error(ErrorCode::NegativeInput,
                "factorization requires nonnegative input; shift the data first");

  constexpr double eps = 1e-12;
  auto rng = make_rng(seed);
  Matrix W = uniform_matrix(Z.rows(), r, rng, 0.1, 1.0);
  Matrix H = uniform_matrix(r, Z.cols(), rng, 0.1, 1.0);

  BaselineModel model;
  model.kind = "nmf";
  double prev = (Z - W * H).squaredNorm();
  model.objective_trace.push_back(prev);

  for (int iter = 0; iter < max_iters; ++iter) {
    H.array() *= (W.transpose() * Z).array() /
                 ((W.transpose() * W) * H).array().max(eps);
    W.array() *= (Z * H.transpose()).array() /
                 (W * (H * H.transpose())).array().max(eps);
    const double obj = (Z - W * H).squaredNorm();
    model.objective_trace.push_back(obj);
    if (prev > 0.0 && std::abs(prev - obj) / prev < 1e-5) break;
    prev = obj;
  }

  model.basis = std::move(W);
  model.coeffs = std::move(H);
  model.variance_kept =
      1.0 - model.objective_trace.back() / std::max(Z.squaredNorm(), eps);
  return model;
}

// Clusters the samples by their coefficient vectors.
inline std::vector<int> baseline_cluster(const BaselineModel& model, int K,
                                         std::uint64_t seed) {
  return kmeans(model.coeffs.transpose(), K, seed).labels;
}

}  // namespace mfc0
