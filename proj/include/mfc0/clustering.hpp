#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mfc0/core.hpp"
#include "mfc0/hungarian.hpp"
#include "mfc0/kmeans.hpp"

namespace mfc0 {

// Sample-by-sample affinity from the representation. Y'Y is symmetric up to
// roundoff; negative inner products carry no grouping information here and
// are clamped away.
inline Matrix affinity(const Matrix& Y) {
  Matrix G = Y.transpose() * Y;
  G = 0.5 * (G + G.transpose());
  return G.cwiseMax(0.0);
}

// Spectral partition of the affinity graph: bottom-K eigenvectors of the
// symmetric normalized Laplacian, rows renormalized, then k-means.
// Isolated vertices (degree ~ 0) are tolerated and reported through the
// optional flag instead of propagating a division by zero.
inline std::vector<int> normalized_cut(const Matrix& W, int K,
                                       std::uint64_t seed,
                                       bool* disconnected = nullptr) {
  if (W.rows() != W.cols())
    throw Error(ErrorCode::DimensionMismatch, "affinity matrix must be square");
  const int n = static_cast<int>(W.rows());
  if (K <= 0 || K > n)
    throw Error(ErrorCode::BadConfig, "normalized_cut requires 0 < K <= n");

  Vector deg = W.rowwise().sum();
  Vector dinv_sqrt(n);
  bool isolated = false;
  for (int i = 0; i < n; ++i) {
    if (deg[i] < 1e-12) {
      dinv_sqrt[i] = 0.0;
      isolated = true;
    } else {
      dinv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
    }
  }
  if (disconnected) *disconnected = isolated;

  Matrix L = Matrix::Identity(n, n) -
             dinv_sqrt.asDiagonal() * W * dinv_sqrt.asDiagonal();
  L = 0.5 * (L + L.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(L);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::NonFinite, "eigendecomposition failed on the Laplacian");
  Matrix embed = eig.eigenvectors().leftCols(K);
  for (int i = 0; i < n; ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 1e-12) embed.row(i) /= norm;
  }
  return kmeans(embed, K, seed).labels;
}

// Clustering accuracy under the best one-to-one relabeling, found by solving
// the assignment problem on the confusion matrix.
inline double accuracy(const std::vector<int>& predicted,
                       const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw Error(ErrorCode::LengthMismatch, "label vectors differ in length");
  if (predicted.empty())
    throw Error(ErrorCode::LengthMismatch, "label vectors are empty");
  int K = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || truth[i] < 0)
      throw Error(ErrorCode::BadConfig, "labels must be nonnegative");
    K = std::max({K, predicted[i] + 1, truth[i] + 1});
  }
  Matrix confusion = Matrix::Zero(K, K);
  for (size_t i = 0; i < predicted.size(); ++i)
    confusion(predicted[i], truth[i]) += 1.0;
  std::vector<int> assign = hungarian_min(-confusion);
  double matched = 0.0;
  for (int i = 0; i < K; ++i) matched += confusion(i, assign[i]);
  return matched / static_cast<double>(predicted.size());
}

struct BlockView {
  Matrix permuted;
  std::vector<int> col_order;       // original column index at each position
  std::vector<int> row_assignment;  // class owning each original row
  std::vector<int> row_order;       // original row index at each position
};

// Rearranges a representation so same-class columns are adjacent and each row
// sits with the class where it carries the most l1 mass. On a clean fit the
// result is visibly block diagonal.
inline BlockView block_view(const Matrix& Y, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != Y.cols())
    throw Error(ErrorCode::LengthMismatch, "one label per column required");
  int K = 0;
  for (int l : labels) {
    if (l < 0) throw Error(ErrorCode::BadConfig, "labels must be nonnegative");
    K = std::max(K, l + 1);
  }

  BlockView view;
  view.col_order.resize(Y.cols());
  std::iota(view.col_order.begin(), view.col_order.end(), 0);
  std::stable_sort(view.col_order.begin(), view.col_order.end(),
                   [&](int a, int b) { return labels[a] < labels[b]; });

  view.row_assignment.resize(Y.rows());
  for (int r = 0; r < Y.rows(); ++r) {
    std::vector<double> mass(K, 0.0);
    for (int c = 0; c < Y.cols(); ++c) mass[labels[c]] += std::abs(Y(r, c));
    // Ties break toward the smaller class id.
    view.row_assignment[r] = static_cast<int>(
        std::max_element(mass.begin(), mass.end()) - mass.begin());
  }
  view.row_order.resize(Y.rows());
  std::iota(view.row_order.begin(), view.row_order.end(), 0);
  std::stable_sort(view.row_order.begin(), view.row_order.end(), [&](int a, int b) {
    return view.row_assignment[a] < view.row_assignment[b];
  });

  view.permuted.resize(Y.rows(), Y.cols());
  for (int r = 0; r < Y.rows(); ++r)
    for (int c = 0; c < Y.cols(); ++c)
      view.permuted(r, c) = Y(view.row_order[r], view.col_order[c]);
  return view;
}

// Fraction of absolute mass that lands outside the diagonal blocks of the
// permuted representation. Zero means perfectly block diagonal.
inline double offblock_relative_mass(const Matrix& Y,
                                     const std::vector<int>& labels) {
  BlockView view = block_view(Y, labels);
  double off = 0.0, total = 0.0;
  for (int r = 0; r < Y.rows(); ++r) {
    for (int c = 0; c < Y.cols(); ++c) {
      const double a = std::abs(Y(r, c));
      total += a;
      if (view.row_assignment[r] != labels[c]) off += a;
    }
  }
  return total > 0.0 ? off / total : 0.0;
}

struct ClusterResult {
  std::vector<int> labels;          // cluster id per sample
  double accuracy = -1.0;           // set only when ground truth is supplied
  std::vector<int> permutation;     // column order grouping same-class samples
  std::vector<int> row_assignment;  // class owning each representation row
};

// Whole grouping pipeline on a learned representation: spectral cut of the
// affinity, then the block permutation. Pass ground truth to score the labels;
// without it the accuracy field stays negative.
inline ClusterResult cluster(const Matrix& Y, int K, std::uint64_t seed,
                             const std::vector<int>* truth = nullptr) {
  ClusterResult out;
  out.labels = normalized_cut(affinity(Y), K, seed);
  BlockView view = block_view(Y, out.labels);
  out.permutation = std::move(view.col_order);
  out.row_assignment = std::move(view.row_assignment);
  if (truth) out.accuracy = accuracy(out.labels, *truth);
  return out;
}

struct ExtractedBases {
  std::vector<Matrix> bases;
  bool balanced = true;  // false when the classes do not split X evenly
};

// Splits the learned dictionary into per-class bases using the row ownership
// computed by block_view. Columns of X correspond to rows of Y.
inline ExtractedBases extract_bases(const Matrix& X,
                                    const std::vector<int>& row_assignment,
                                    int K) {
  if (static_cast<int>(row_assignment.size()) != X.cols())
    throw Error(ErrorCode::LengthMismatch,
                "need one class per dictionary column");
  ExtractedBases out;
  out.bases.reserve(K);
  std::vector<std::vector<int>> members(K);
  for (int i = 0; i < static_cast<int>(row_assignment.size()); ++i) {
    const int k = row_assignment[i];
    if (k < 0 || k >= K)
      throw Error(ErrorCode::BadConfig, "row assignment outside [0, K)");
    members[k].push_back(i);
  }
  const int expected = static_cast<int>(X.cols()) / std::max(K, 1);
  for (int k = 0; k < K; ++k) {
    if (static_cast<int>(members[k].size()) != expected) out.balanced = false;
    Matrix B(X.rows(), static_cast<int>(members[k].size()));
    for (size_t j = 0; j < members[k].size(); ++j)
      B.col(static_cast<int>(j)) = X.col(members[k][j]);
    out.bases.push_back(std::move(B));
  }
  return out;
}

inline Matrix reconstruct(const Matrix& X, const Matrix& Y) {
  if (X.cols() != Y.rows())
    throw Error(ErrorCode::DimensionMismatch, "X*Y shapes do not agree");
  return X * Y;
}

inline Matrix errors_view(const Matrix& Z, const Matrix& X, const Matrix& Y) {
  if (Z.rows() != X.rows() || Z.cols() != Y.cols())
    throw Error(ErrorCode::DimensionMismatch, "Z vs X*Y shapes do not agree");
  return Z - reconstruct(X, Y);
}

}  // namespace mfc0
