#pragma once

#include <algorithm>
#include <numeric>

#include "mfc0/core.hpp"

namespace mfc0 {

struct SvdTriple {
  Matrix Lfac;   // left singular vectors, orthonormal columns
  Vector Sigma;  // singular values, descending
  Matrix Rfac;   // right singular vectors
};

inline SvdTriple thin_svd(const Matrix& M) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdTriple{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

struct ProcrustesResult {
  Matrix D;
  // Set when a singular value of A*B^T falls below 1e-12: the minimizer is
  // still valid but no longer unique.
  bool rank_deficient = false;
};

// argmin_D ||A - D*B||_F subject to D^T D = I, via the SVD of A*B^T.
inline ProcrustesResult procrustes(const Matrix& A, const Matrix& B) {
  if (A.cols() != B.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "procrustes: A and B must have the same number of columns");
  if (B.rows() > A.rows())
    throw Error(ErrorCode::DimensionMismatch,
                "procrustes: need d <= m for orthonormal columns");
  Matrix M = A * B.transpose();
  if (!all_finite(M))
    throw Error(ErrorCode::BadConfig, "procrustes: A*B^T has non-finite entries");
  SvdTriple svd = thin_svd(M);
  ProcrustesResult out;
  out.D = svd.Lfac * svd.Rfac.transpose();
  out.rank_deficient = svd.Sigma.size() > 0 && svd.Sigma.minCoeff() < 1e-12;
  return out;
}

// Elementwise soft threshold: argmin_E ||E - G||_F^2 + 2*tau*||E||_1.
inline Matrix prox_l1(const Matrix& G, double tau) {
  if (!(tau > 0)) throw Error(ErrorCode::BadConfig, "prox_l1: tau must be > 0");
  return G.unaryExpr([tau](double g) {
    const double mag = std::abs(g) - tau;
    return mag > 0 ? (g > 0 ? mag : -mag) : 0.0;
  });
}

// Columnwise shrinkage: argmin_E ||E - G||_F^2 + 2*tau*||E||_{2,1}.
// Columns with norm below tau collapse to zero.
inline Matrix prox_l21(const Matrix& G, double tau) {
  if (!(tau > 0)) throw Error(ErrorCode::BadConfig, "prox_l21: tau must be > 0");
  Matrix E = Matrix::Zero(G.rows(), G.cols());
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    const double norm = G.col(j).norm();
    if (norm >= tau && norm > 0) E.col(j) = (1.0 - tau / norm) * G.col(j);
  }
  return E;
}

// Projection onto {v >= 0, ||v||_0 <= d0}: clamp negatives, then keep the d0
// largest surviving entries in place. Ties prefer the smaller index so the
// operator is deterministic. When fewer than d0 entries are positive the
// result keeps them all (||v||_0 < d0 is then unavoidable).
inline Vector prox_nonneg_l0(const Vector& u, int d0) {
  const int d = static_cast<int>(u.size());
  if (d0 < 1 || d0 > d)
    throw Error(ErrorCode::BadConfig, "prox_nonneg_l0: need 1 <= d0 <= d");
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&u](int a, int b) {
    if (u[a] != u[b]) return u[a] > u[b];
    return a < b;
  });
  Vector v = Vector::Zero(d);
  for (int r = 0; r < d0; ++r) {
    const int i = idx[r];
    if (u[i] > 0) v[i] = u[i];
  }
  return v;
}

inline Matrix prox_nonneg_l0_columns(const Matrix& U, int d0) {
  Matrix V(U.rows(), U.cols());
  for (Eigen::Index j = 0; j < U.cols(); ++j)
    V.col(j) = prox_nonneg_l0(U.col(j), d0);
  return V;
}

}  // namespace mfc0
