#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mfc0/operators.hpp"

using namespace mfc0;

namespace {

// ---- Independent oracles (no calls into the library's operator code) ----

// Exhaustive minimizer of ||u - v||^2 over supports of size <= d0 with v >= 0.
// Written against the definition only; used to pin prox_nonneg_l0.
struct L0Oracle {
  Vector v;
  double objective;
};

L0Oracle brute_force_nonneg_l0(const Vector& u, int d0) {
  const int d = static_cast<int>(u.size());
  L0Oracle best{Vector::Zero(d), u.squaredNorm()};  // empty support
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    if (__builtin_popcount(mask) > d0) continue;
    Vector v = Vector::Zero(d);
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) v[i] = std::max(u[i], 0.0);
    const double obj = (u - v).squaredNorm();
    if (obj < best.objective - 1e-15) {
      best.v = v;
      best.objective = obj;
    }
  }
  return best;
}

// Random matrix with orthonormal columns, for Monte-Carlo comparators.
Matrix random_orthonormal(int m, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix G(m, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < m; ++i) G(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(m, d);
}

// Scalar grid search for argmin (e-g)^2 + 2*tau*|e|.
double grid_prox_scalar(double g, double tau) {
  const double span = 2.0 * std::abs(g) + 1.0;
  double best_e = 0.0, best_obj = g * g;
  for (double e = -span; e <= span; e += 1e-4) {
    const double obj = (e - g) * (e - g) + 2.0 * tau * std::abs(e);
    if (obj < best_obj) {
      best_obj = obj;
      best_e = e;
    }
  }
  return best_e;
}

// Line search along g for argmin ||e-g||^2 + 2*tau*||e||_2 with e = t*g.
// (The minimizer is collinear with g: any orthogonal component only adds cost.)
Vector line_search_prox_column(const Vector& g, double tau) {
  double best_t = 0.0, best_obj = g.squaredNorm();
  for (double t = 0.0; t <= 1.5; t += 1e-5) {
    const double obj =
        (t - 1.0) * (t - 1.0) * g.squaredNorm() + 2.0 * tau * t * g.norm();
    if (obj < best_obj) {
      best_obj = obj;
      best_t = t;
    }
  }
  return best_t * g;
}

double procrustes_objective(const Matrix& A, const Matrix& D, const Matrix& B) {
  return (A - D * B).squaredNorm();
}

}  // namespace

TEST_CASE("prox_nonneg_l0 matches brute-force support enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int d = 1; d <= 6; ++d) {
    for (int d0 = 1; d0 <= d; ++d0) {
      for (int rep = 0; rep < 200; ++rep) {
        Vector u(d);
        for (int i = 0; i < d; ++i) u[i] = unif(rng);
        Vector v = prox_nonneg_l0(u, d0);
        L0Oracle oracle = brute_force_nonneg_l0(u, d0);
        REQUIRE((u - v).squaredNorm() == Catch::Approx(oracle.objective).margin(1e-12));
        REQUIRE((v - oracle.v).lpNorm<Eigen::Infinity>() < 1e-12);
      }
    }
  }
}

TEST_CASE("prox_nonneg_l0 pinned examples") {
  SECTION("mixed-sign vector keeps the two largest positives") {
    Vector u(4);
    u << 3, -1, 2, 0.5;
    Vector v = prox_nonneg_l0(u, 2);
    Vector expect(4);
    expect << 3, 0, 2, 0;
    REQUIRE((v - expect).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SECTION("nonnegative input with exactly d0 nonzeros is a fixed point") {
    Vector u(5);
    u << 0, 2.5, 0, 1.5, 0;
    REQUIRE((prox_nonneg_l0(u, 2) - u).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SECTION("all-negative input maps to zero") {
    Vector u(3);
    u << -1, -2, -0.5;
    REQUIRE(prox_nonneg_l0(u, 2).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SECTION("output entries are a subset of the clamped input") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
      Vector u(8);
      for (int i = 0; i < 8; ++i) u[i] = unif(rng);
      Vector v = prox_nonneg_l0(u, 3);
      int nnz = 0;
      for (int i = 0; i < 8; ++i) {
        if (v[i] != 0) {
          ++nnz;
          REQUIRE(v[i] == u[i]);
          REQUIRE(u[i] > 0);
        }
      }
      REQUIRE(nnz <= 3);
    }
  }
  SECTION("tie on equal values keeps the smaller index") {
    Vector u(4);
    u << 1.0, 2.0, 2.0, 2.0;
    Vector v = prox_nonneg_l0(u, 2);
    REQUIRE(v[1] == 2.0);
    REQUIRE(v[2] == 2.0);
    REQUIRE(v[0] == 0.0);
    REQUIRE(v[3] == 0.0);
  }
}

TEST_CASE("procrustes solves the orthonormal fitting problem") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;

  SECTION("identity inputs return identity") {
    Matrix I2 = Matrix::Identity(2, 2);
    ProcrustesResult r = procrustes(I2, I2);
    REQUIRE((r.D - I2).lpNorm<Eigen::Infinity>() < 1e-12);
  }

  SECTION("recovers a known rotation") {
    // Rotation about z by 0.7 rad.
    Matrix R(3, 3);
    const double c = std::cos(0.7), s = std::sin(0.7);
    R << c, -s, 0, s, c, 0, 0, 0, 1;
    Matrix B(3, 5);
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 3; ++i) B(i, j) = gauss(rng);
    ProcrustesResult r = procrustes(R * B, B);
    REQUIRE((r.D - R).lpNorm<Eigen::Infinity>() < 1e-8);
  }

  SECTION("Monte-Carlo optimality against random orthonormal comparators") {
    for (int rep = 0; rep < 20; ++rep) {
      const int m = 4, d = 2, n = 6;
      Matrix A(m, n), B(d, n);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) A(i, j) = gauss(rng);
        for (int i = 0; i < d; ++i) B(i, j) = gauss(rng);
      }
      ProcrustesResult r = procrustes(A, B);
      REQUIRE((r.D.transpose() * r.D - Matrix::Identity(d, d))
                  .lpNorm<Eigen::Infinity>() < 1e-8);
      const double obj = procrustes_objective(A, r.D, B);
      for (int q = 0; q < 100; ++q) {
        Matrix Q = random_orthonormal(m, d, rng);
        REQUIRE(obj <= procrustes_objective(A, Q, B) + 1e-9);
      }
    }
  }

  SECTION("rank-deficient product raises the flag, not an error") {
    Matrix A = Matrix::Zero(3, 4);
    Matrix B(2, 4);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 2; ++i) B(i, j) = gauss(rng);
    ProcrustesResult r = procrustes(A, B);
    REQUIRE(r.rank_deficient);
    REQUIRE((r.D.transpose() * r.D - Matrix::Identity(2, 2))
                .lpNorm<Eigen::Infinity>() < 1e-8);
  }

  SECTION("thin SVD triple invariants") {
    Matrix M(5, 3);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 5; ++i) M(i, j) = gauss(rng);
    SvdTriple svd = thin_svd(M);
    for (int i = 1; i < svd.Sigma.size(); ++i)
      REQUIRE(svd.Sigma[i] <= svd.Sigma[i - 1]);
    REQUIRE(svd.Sigma.minCoeff() >= 0.0);
    REQUIRE((svd.Lfac.transpose() * svd.Lfac - Matrix::Identity(3, 3))
                .lpNorm<Eigen::Infinity>() < 1e-8);
    REQUIRE((svd.Rfac.transpose() * svd.Rfac - Matrix::Identity(3, 3))
                .lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("prox_l1 soft threshold") {
  SECTION("pinned example") {
    Matrix G(1, 2);
    G << 1.0, -0.2;
    Matrix E = prox_l1(G, 0.5);
    REQUIRE(E(0, 0) == Catch::Approx(0.5));
    REQUIRE(E(0, 1) == 0.0);
  }
  SECTION("zero is a fixed point") {
    REQUIRE(prox_l1(Matrix::Zero(3, 3), 1.7).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SECTION("matches per-entry grid search") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Matrix G(3, 3);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) G(i, j) = unif(rng);
    Matrix E = prox_l1(G, 0.7);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        REQUIRE(E(i, j) == Catch::Approx(grid_prox_scalar(G(i, j), 0.7)).margin(2e-4));
  }
}

TEST_CASE("prox_l21 column shrinkage") {
  SECTION("pinned example: (3,4) with tau 2.5 halves the column") {
    Matrix G(2, 1);
    G << 3, 4;
    Matrix E = prox_l21(G, 2.5);
    REQUIRE(E(0, 0) == Catch::Approx(1.5));
    REQUIRE(E(1, 0) == Catch::Approx(2.0));
  }
  SECTION("below-threshold column collapses to zero") {
    Matrix G(3, 1);
    G << 0.1, 0.1, 0.1;
    const double tau = 2.0 * G.col(0).norm();  // ||g|| = tau/2
    REQUIRE(prox_l21(G, tau).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SECTION("zero column maps to zero column without error") {
    Matrix G = Matrix::Zero(4, 2);
    G(0, 1) = 5.0;
    Matrix E = prox_l21(G, 1.0);
    REQUIRE(E.col(0).norm() == 0.0);
    REQUIRE(E(0, 1) == Catch::Approx(4.0));
  }
  SECTION("matches per-column line-search oracle") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss;
    Matrix G(4, 5);
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 4; ++i) G(i, j) = gauss(rng);
    Matrix E = prox_l21(G, 0.9);
    for (int j = 0; j < 5; ++j) {
      Vector oracle = line_search_prox_column(G.col(j), 0.9);
      REQUIRE((E.col(j) - oracle).lpNorm<Eigen::Infinity>() < 1e-4);
    }
  }
}

TEST_CASE("prox operators are nonexpansive") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 50; ++rep) {
    Matrix G1(4, 4), G2(4, 4);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) {
        G1(i, j) = gauss(rng);
        G2(i, j) = gauss(rng);
      }
    REQUIRE((prox_l1(G1, 0.6) - prox_l1(G2, 0.6)).norm() <=
            (G1 - G2).norm() + 1e-12);
    REQUIRE((prox_l21(G1, 0.6) - prox_l21(G2, 0.6)).norm() <=
            (G1 - G2).norm() + 1e-12);
  }
}
