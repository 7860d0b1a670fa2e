#pragma once

#include <chrono>

#include "mfc0/core.hpp"
#include "mfc0/operators.hpp"

namespace mfc0 {

inline double error_norm_value(const Matrix& E, ErrorNorm norm) {
  switch (norm) {
    case ErrorNorm::L1: return E.cwiseAbs().sum();
    case ErrorNorm::L21: {
      double s = 0.0;
      for (Eigen::Index j = 0; j < E.cols(); ++j) s += E.col(j).norm();
      return s;
    }
    case ErrorNorm::None: return 0.0;
  }
  return 0.0;
}

inline Objective objective_of(const Matrix& Z, const FactorState& s,
                              const SolverConfig& cfg) {
  Objective obj;
  obj.fit_term = (Z - s.X * s.Y - s.E).squaredNorm();
  obj.reg_term = cfg.error_norm == ErrorNorm::None
                     ? 0.0
                     : cfg.lambda * error_norm_value(s.E, cfg.error_norm);
  obj.total = obj.fit_term + obj.reg_term;
  return obj;
}

// Model objective plus multiplier coupling and quadratic penalty on Y = V.
// Exposed for the per-step descent checks.
inline double augmented_lagrangian(const Matrix& Z, const FactorState& s,
                                   const SolverConfig& cfg) {
  const Objective obj = objective_of(Z, s, cfg);
  const Matrix R = s.Y - s.V;
  return obj.total + (s.P.array() * R.array()).sum() +
         0.5 * s.beta * R.squaredNorm();
}

inline FactorState init_state(const Problem& p) {
  const auto m = p.Z.rows(), n = p.Z.cols();
  const int d = p.spec.d();
  auto rng = make_rng(p.cfg.seed);
  FactorState s;
  s.X = orthonormalize(gaussian_matrix(m, d, rng));
  s.Y = s.X.transpose() * p.Z;  // warm start: least-squares coefficients
  s.V = Matrix::Zero(d, n);
  s.E = Matrix::Zero(m, n);
  s.P = Matrix::Zero(d, n);
  s.mu = p.cfg.mu0;
  s.beta = p.cfg.beta_policy == BetaPolicy::TiedToMu ? p.cfg.mu0 : p.cfg.beta_fixed;
  return s;
}

// X step: orthonormal basis closest to explaining Z - E through Y.
inline bool update_X(FactorState& s, const Matrix& Z) {
  ProcrustesResult r = procrustes(Z - s.E, s.Y);
  s.X = std::move(r.D);
  return r.rank_deficient;
}

// Y step. The quadratic subproblem
//   min_Y ||Z - XY - E||_F^2 + <P, Y - V> + (beta/2)||Y - V||_F^2
// has stationary point (2 + beta) Y = 2 X^T (Z - E) + beta V - P when X has
// orthonormal columns; that is the ExactStationarity rule. PaperLiteral keeps
// the historical variant with both coefficients halved.
inline void update_Y(FactorState& s, const Matrix& Z, const SolverConfig& cfg) {
  const Matrix proj = s.X.transpose() * (Z - s.E);
  if (cfg.y_update == YUpdateRule::ExactStationarity)
    s.Y = (2.0 * proj + s.beta * s.V - s.P) / (2.0 + s.beta);
  else
    s.Y = (proj + s.beta * s.V - s.P) / (1.0 + s.beta);
}

// E step: proximal map of the chosen error norm on the current residual.
inline void update_E(FactorState& s, const Matrix& Z, const SolverConfig& cfg) {
  if (cfg.error_norm == ErrorNorm::None) {
    s.E.setZero();
    return;
  }
  const Matrix G = Z - s.X * s.Y;
  s.E = cfg.error_norm == ErrorNorm::L1 ? prox_l1(G, cfg.lambda / 2.0)
                                        : prox_l21(G, cfg.lambda / 2.0);
}

// V step: project Y + P/beta onto the nonnegative column-sparse set.
inline void update_V(FactorState& s, const SubspaceSpec& spec) {
  if (!(s.beta > 0))
    throw Error(ErrorCode::BadConfig, "update_V requires beta > 0");
  const Matrix U = s.Y + s.P / s.beta;
  s.V = prox_nonneg_l0_columns(U, spec.d0);
}

// Multiplier and step-size update; beta tracks mu under TiedToMu.
inline void update_P(FactorState& s, const SolverConfig& cfg) {
  s.P += s.mu * (s.Y - s.V);
  s.mu = std::min(cfg.rho * s.mu, cfg.mu_max);
  if (cfg.beta_policy == BetaPolicy::TiedToMu) s.beta = s.mu;
}

inline FitResult fit(const Problem& p) {
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix& Z = p.Z;
  const SolverConfig& cfg = p.cfg;
  FactorState s = init_state(p);

  FitResult out;
  out.objective_trace.reserve(64);
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    out.rank_deficient_seen |= update_X(s, Z);
    update_Y(s, Z, cfg);
    update_E(s, Z, cfg);
    update_V(s, p.spec);
    update_P(s, cfg);

    if (!all_finite(s.Y) || !all_finite(s.E) || !all_finite(s.P))
      throw Error(ErrorCode::NonFinite,
                  "solver state diverged at iteration " + std::to_string(iter) +
                      " (" + std::to_string(out.objective_trace.size()) +
                      " objective values recorded)");

    out.objective_trace.push_back(objective_of(Z, s, cfg));
    out.iterations = iter;

    // Disjunctive stopping test; the first iteration is skipped because the
    // all-zero V makes ||Y - V|| meaningless before V has been updated twice.
    if (iter >= 2) {
      const double c1 = (Z - s.X * s.Y).lpNorm<Eigen::Infinity>();
      const double c2 = (s.Y - s.V).lpNorm<Eigen::Infinity>();
      if (c1 <= cfg.epsilon || c2 <= cfg.epsilon) {
        out.converged = true;
        break;
      }
    }
  }

  out.X = std::move(s.X);
  out.Y = std::move(s.Y);
  out.E = std::move(s.E);
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace mfc0
