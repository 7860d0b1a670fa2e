#pragma once

#include <limits>
#include <random>
#include <vector>

#include "mfc0/core.hpp"

namespace mfc0 {

struct KmeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
};

namespace detail {

// Farthest-point seeding: random first centre, then repeatedly the point
// furthest from everything chosen so far. Deterministic given the rng.
inline Matrix farthest_point_init(const Matrix& points, int K, std::mt19937_64& rng) {
  const int n = static_cast<int>(points.rows());
  Matrix centers(K, points.cols());
  std::uniform_int_distribution<int> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));
  Vector dist = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int k = 1; k < K; ++k) {
    int far = 0;
    dist.maxCoeff(&far);
    centers.row(k) = points.row(far);
    dist = dist.cwiseMin(
        (points.rowwise() - centers.row(k)).rowwise().squaredNorm());
  }
  return centers;
}

inline KmeansResult kmeans_single(const Matrix& points, int K,
                                  std::mt19937_64& rng, int max_iters) {
  const int n = static_cast<int>(points.rows());
  Matrix centers = farthest_point_init(points, K, rng);
  std::vector<int> labels(n, 0);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        const double d = (points.row(i) - centers.row(k)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (best != labels[i]) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Matrix sums = Matrix::Zero(K, points.cols());
    std::vector<int> counts(K, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[i]) += points.row(i);
      ++counts[labels[i]];
    }
    for (int k = 0; k < K; ++k) {
      // An emptied cluster keeps its previous centre rather than collapsing.
      if (counts[k] > 0) centers.row(k) = sums.row(k) / counts[k];
    }
  }

  KmeansResult result;
  result.labels = std::move(labels);
  for (int i = 0; i < n; ++i)
    result.inertia += (points.row(i) - centers.row(result.labels[i])).squaredNorm();
  return result;
}

}  // namespace detail

// Lloyd iterations with farthest-point restarts; rows of `points` are samples.
// The best inertia over the restarts wins.
inline KmeansResult kmeans(const Matrix& points, int K, std::uint64_t seed,
                           int restarts = 20, int max_iters = 300) {
  if (K <= 0 || K > points.rows())
    throw Error(ErrorCode::BadConfig, "kmeans requires 0 < K <= #points");
  auto rng = make_rng(seed);
  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    KmeansResult cur = detail::kmeans_single(points, K, rng, max_iters);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

}  // namespace mfc0
