#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfc0 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  BadConfig,
  NegativeEntry,
  DimensionMismatch,
  LengthMismatch,
  NegativeInput,
  NonFinite,
  ParseError,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct SubspaceSpec {
  int K = 1;   // number of subspaces
  int d0 = 1;  // dimension of each subspace
  int d() const { return K * d0; }
};

enum class ErrorNorm { L1, L21, None };
enum class BetaPolicy { TiedToMu, Fixed };
enum class YUpdateRule { PaperLiteral, ExactStationarity };

struct SolverConfig {
  double lambda = 1.0;
  ErrorNorm error_norm = ErrorNorm::None;
  double mu0 = 1e-3;
  double rho = 1.2;
  double mu_max = 1e3;
  double epsilon = 1e-4;
  BetaPolicy beta_policy = BetaPolicy::TiedToMu;
  double beta_fixed = 1.0;  // used only when beta_policy == Fixed
  int max_iters = 1000;
  YUpdateRule y_update = YUpdateRule::ExactStationarity;
  std::uint64_t seed = 0;
};

struct FactorState {
  Matrix X;  // m x d basis, orthonormal columns
  Matrix Y;  // d x n representation
  Matrix V;  // d x n auxiliary copy of Y (nonnegative, column-sparse)
  Matrix E;  // m x n error
  Matrix P;  // d x n Lagrange multiplier
  double mu = 0.0;
  double beta = 0.0;
};

struct Objective {
  double fit_term = 0.0;  // ||Z - XY - E||_F^2
  double reg_term = 0.0;  // lambda * ||E||_Delta
  double total = 0.0;
};

struct FitResult {
  Matrix X;
  Matrix Y;
  Matrix E;
  std::vector<Objective> objective_trace;  // one entry per iteration
  int iterations = 0;
  double elapsed_seconds = 0.0;
  bool converged = false;
  bool rank_deficient_seen = false;  // any X update hit a near-zero singular value
};

struct ValidationOptions {
  // The library contract rejects negative data entries. Synthetic benchmark
  // matrices produced by orthonormal chaining are signed, so internal
  // pipelines (and the CLI behind an explicit flag) may opt out.
  bool allow_negative = false;
};

// A validated problem: data plus configuration that passed all invariants.
struct Problem {
  Matrix Z;
  SubspaceSpec spec;
  SolverConfig cfg;
};

inline bool all_finite(const Matrix& M) { return M.allFinite(); }

inline Problem validate_problem(const Matrix& Z, const SubspaceSpec& spec,
                                const SolverConfig& cfg,
                                const ValidationOptions& opts = {}) {
  const auto m = Z.rows(), n = Z.cols();
  if (m < 1 || n < 1)
    throw Error(ErrorCode::BadConfig, "Z must have at least one row and one column");
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      const double v = Z(i, j);
      if (!std::isfinite(v))
        throw Error(ErrorCode::BadConfig,
                    "Z has non-finite entry at row " + std::to_string(i) +
                        ", col " + std::to_string(j));
      if (!opts.allow_negative && v < 0.0)
        throw Error(ErrorCode::NegativeEntry,
                    "Z has negative entry at row " + std::to_string(i) +
                        ", col " + std::to_string(j));
    }
  if (spec.K < 1 || spec.d0 < 1)
    throw Error(ErrorCode::BadConfig, "K and d0 must be positive");
  if (spec.d() > std::min(m, n))
    throw Error(ErrorCode::DimensionMismatch,
                "K*d0 = " + std::to_string(spec.d()) + " exceeds min(m,n) = " +
                    std::to_string(std::min(m, n)));
  if (!(cfg.lambda > 0)) throw Error(ErrorCode::BadConfig, "lambda must be > 0");
  if (!(cfg.mu0 > 0)) throw Error(ErrorCode::BadConfig, "mu0 must be > 0");
  if (!(cfg.rho > 1)) throw Error(ErrorCode::BadConfig, "rho must be > 1");
  if (!(cfg.mu_max >= cfg.mu0))
    throw Error(ErrorCode::BadConfig, "mu_max must be >= mu0");
  if (!(cfg.epsilon > 0)) throw Error(ErrorCode::BadConfig, "epsilon must be > 0");
  if (cfg.max_iters < 1) throw Error(ErrorCode::BadConfig, "max_iters must be >= 1");
  if (cfg.beta_policy == BetaPolicy::Fixed && !(cfg.beta_fixed > 0))
    throw Error(ErrorCode::BadConfig, "fixed beta must be > 0");
  return Problem{Z, spec, cfg};
}

// Seeded RNG helpers shared by the solver, generators, and clustering.

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = gauss(rng);
  return M;
}

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols,
                             std::mt19937_64& rng, double lo = 0.0,
                             double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = unif(rng);
  return M;
}

// Thin orthonormal basis for the range of M (QR-based).
inline Matrix orthonormalize(const Matrix& M) {
  Eigen::HouseholderQR<Matrix> qr(M);
  return qr.householderQ() * Matrix::Identity(M.rows(), M.cols());
}

}  // namespace mfc0
