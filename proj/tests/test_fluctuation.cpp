#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "optosync/errors.hpp"
#include "optosync/fluctuation.hpp"
#include "optosync/matrix_kernels.hpp"
#include "test_support.hpp"

using namespace optosync;
using namespace optosync::testing;
using cd = std::complex<double>;

namespace {

// The drift matrix written out row by row.
Matrix drift_table(const SystemParams& p, const ClassicalState& s) {
  const double r2 = std::sqrt(2.0);
  const cd G1 = p.g1 * s.alpha1;
  const cd G2 = p.g2 * s.alpha2;
  const double d1 = p.delta1 - p.g1 * s.q1s;
  const double d2 = p.delta2 - p.g2 * s.q2s;
  const double w1 = p.omega1, w2 = p.omega2, k1 = p.kappa1, k2 = p.kappa2;
  const double c = p.chi_c, J = p.tunnel_j;
  return Matrix{
      {0, w1, 0, 0, 0, 0, 0, 0},
      {-w1, -p.gamma_m1, r2 * G1.real(), r2 * G1.imag(), -c, 0, 0, 0},
      {-r2 * G1.imag(), 0, -k1, d1, 0, 0, 0, J},
      {r2 * G1.real(), 0, -d1, -k1, 0, 0, -J, 0},
      {0, 0, 0, 0, 0, w2, 0, 0},
      {-c, 0, 0, 0, -w2, -p.gamma_m2, r2 * G2.real(), r2 * G2.imag()},
      {0, 0, 0, J, -r2 * G2.imag(), 0, -k2, d2},
      {0, 0, -J, 0, r2 * G2.real(), 0, -d2, -k2},
  };
}

Matrix8 random8(std::mt19937_64& rng, bool symmetric) {
  return Matrix8::from_matrix(symmetric ? random_symmetric(rng, 8) : random_matrix(rng, 8));
}

double max_abs_diff(const Matrix8& a, const Matrix8& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < 64; ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

} // namespace

TEST_CASE("build_drift") {
  SUBCASE("entries at zero displacement") {
    const DriftMatrix a = build_drift(fig2_params(0.4), ClassicalState{});
    CHECK(a(0, 1) == 1.0);
    CHECK(a(1, 4) == -0.4);
    CHECK(a(5, 0) == -0.4);
    CHECK(a(2, 7) == 0.02);
    CHECK(a(3, 6) == -0.02);
    CHECK(a(6, 3) == 0.02);
    CHECK(a(7, 2) == -0.02);
    CHECK(a(2, 2) == -0.15);
    CHECK(a(2, 3) == -1.0);
    CHECK(a(4, 5) == 1.005);
  }
  SUBCASE("zero coupling is block diagonal") {
    SystemParams p = fig2_params(0.0);
    p.g1 = p.g2 = 0.0;
    p.tunnel_j = 0.0;
    ClassicalState s{3.0, 1.0, {5.0, -2.0}, -1.0, 0.5, {7.0, 1.0}};
    const DriftMatrix a = build_drift(p, s);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j)
        if ((i < 4) != (j < 4)) CHECK(a(i, j) == 0.0);
  }
  SUBCASE("entry table oracle with exact sparsity") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 100.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      SystemParams p = fig2_params(u(rng));
      p.g1 = 0.01 * u(rng);
      p.g2 = 0.01 * u(rng);
      p.tunnel_j = u(rng);
      ClassicalState s{n(rng), n(rng), {n(rng), n(rng)}, n(rng), n(rng), {n(rng), n(rng)}};
      const Matrix want = drift_table(p, s);
      const DriftMatrix got = build_drift(p, s);
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
          CHECK(std::abs(got(i, j) - want(i, j)) <= 1e-14 * std::max(1.0, std::abs(want(i, j))));
          if (want(i, j) == 0.0) CHECK(got(i, j) == 0.0);
        }
    }
  }
}

TEST_CASE("build_diffusion") {
  const DiffusionMatrix d = build_diffusion(fig2_params());
  const double expect[8] = {0, 1e-3, 0.15, 0.15, 0, 1e-3, 0.15, 0.15};
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) CHECK(d(i, j) == (i == j ? expect[i] : 0.0));

  SystemParams p = fig2_params();
  p.n_th = 0.5;
  CHECK(build_diffusion(p)(1, 1) == doctest::Approx(2e-3));
  CHECK(build_diffusion(p)(5, 5) == doctest::Approx(2e-3));

  SystemParams z;
  z.gamma_m1 = z.gamma_m2 = z.kappa1 = z.kappa2 = 0.0;
  CHECK(build_diffusion(z) == DiffusionMatrix{});
}

TEST_CASE("lyapunov_rhs") {
  SUBCASE("zero drift and diffusion") {
    std::mt19937_64 rng(1);
    CHECK(lyapunov_rhs(random8(rng, true), Matrix8{}, Matrix8{}) == Matrix8{});
  }
  SUBCASE("vacuum is stationary under pure damping") {
    const double kappa = 0.37;
    Matrix8 a, d, v;
    for (std::size_t i = 0; i < 8; ++i) {
      a(i, i) = -kappa;
      d(i, i) = 2 * kappa * 0.5;
      v(i, i) = 0.5;
    }
    CHECK(lyapunov_rhs(v, a, d) == Matrix8{});
  }
  SUBCASE("triple-loop oracle and exact symmetry") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix8 v = random8(rng, true);
      const Matrix8 a = random8(rng, false);
      Matrix8 d;
      for (std::size_t i = 0; i < 8; ++i) d(i, i) = std::abs(random_matrix(rng, 1)(0, 0));
      Matrix8 want;
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
          double s = d(i, j);
          for (std::size_t k = 0; k < 8; ++k) s += a(i, k) * v(k, j) + v(i, k) * a(j, k);
          want(i, j) = s;
        }
      const Matrix8 got = lyapunov_rhs(v, a, d);
      CHECK(max_abs_diff(got, want) < 1e-13);
      CHECK(got.max_asymmetry() == 0.0);
    }
  }
}

TEST_CASE("default_initial_covariance and physicality") {
  SystemParams p;
  p.n_th = 2.0;
  const CovarianceMatrix v = default_initial_covariance(p);
  const double expect[8] = {2.5, 2.5, 0.5, 0.5, 2.5, 2.5, 0.5, 0.5};
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) CHECK(v(i, j) == (i == j ? expect[i] : 0.0));
  CHECK(min_symplectic_eigenvalue(v) == doctest::Approx(0.5));

  CovarianceMatrix bad = v;
  bad(0, 0) = -1.0;
  CHECK(std::isnan(min_symplectic_eigenvalue(bad)));

  CovarianceMatrix sub = default_initial_covariance(SystemParams{});
  sub(2, 2) = 0.25; // violates uncertainty with (3,3) = 0.5
  CHECK(min_symplectic_eigenvalue(sub) < 0.5);
  CHECK_THROWS_AS(integrate_coupled(fig2_params(), {}, sub, 1.0, 0.01, 1), DomainError);

  CovarianceMatrix asym = default_initial_covariance(SystemParams{});
  asym(0, 1) = 1e-3;
  CHECK_THROWS_AS(integrate_coupled(fig2_params(), {}, asym, 1.0, 0.01, 1), DomainError);
}

TEST_CASE("integrate_coupled") {
  SUBCASE("decoupled undriven vacuum stays put") {
    SystemParams p = fig2_params(0.0);
    p.g1 = p.g2 = 0.0;
    p.tunnel_j = 0.0;
    p.drive1 = p.drive2 = 0.0;
    const auto t = integrate_coupled(p, {}, default_initial_covariance(p), 50.0, 0.01, 100);
    for (const auto& v : t.covariances)
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
          CHECK(std::abs(v(i, j) - (i == j ? 0.5 : 0.0)) < 1e-14);
    CHECK(t.warning_count() == 0);
  }
  SUBCASE("grids align and the classical part matches integrate_classical") {
    const SystemParams p = fig2_params();
    const auto coupled = integrate_coupled(p, {}, default_initial_covariance(p), 30.0, 1e-2, 50);
    const auto classical = integrate_classical(p, {}, 30.0, 1e-2, 50);
    REQUIRE(coupled.size() == classical.size());
    CHECK(coupled.covariances.size() == coupled.size());
    CHECK(coupled.min_symplectic.size() == coupled.size());
    CHECK(coupled.physicality_warning.size() == coupled.size());
    for (std::size_t k = 0; k < classical.size(); ++k) {
      CHECK(coupled.classical.times[k] == classical.times[k]);
      CHECK(coupled.classical.states[k] == classical.states[k]);
      CHECK(coupled.classical.dphi_unwrapped[k] == classical.dphi_unwrapped[k]);
      CHECK(coupled.covariances[k].max_asymmetry() == 0.0);
    }
  }
  SUBCASE("cross blocks stay zero without coupling") {
    SystemParams p = fig2_params(0.0);
    p.tunnel_j = 0.0;
    const auto t = integrate_coupled(p, {}, default_initial_covariance(p), 20.0, 1e-2, 100);
    for (const auto& v : t.covariances)
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 4; j < 8; ++j) CHECK(v(i, j) == 0.0);
  }
  SUBCASE("divergence") {
    SystemParams p = decoupled_params();
    p.gamma_m1 = -50.0;
    ClassicalState s;
    s.q1s = 1.0;
    const auto cov = default_initial_covariance(p);
    const auto run = integrate_coupled_partial(p, s, cov, 100.0, 0.1, 1);
    REQUIRE(run.diverged_at.has_value());
    CHECK(*run.diverged_at > 0.0);
    CHECK(run.trajectory.size() >= 1);
    CHECK(run.trajectory.covariances.size() == run.trajectory.size());
    CHECK_THROWS_AS(integrate_coupled(p, s, cov, 100.0, 0.1, 1), IntegrationDiverged);
  }
}

TEST_CASE("integrate_frozen_covariance") {
  SUBCASE("diffusion-free evolution matches exp(At) V exp(At)^T") {
    std::mt19937_64 rng(4);
    const Matrix a = random_stable(rng, 8);
    const CovarianceMatrix v0 = random_physical_covariance(rng);
    const std::vector<double> checkpoints{0.5, 1.0, 2.5, 4.0};
    const auto got = integrate_frozen_covariance(Matrix8::from_matrix(a), Matrix8{}, v0,
                                                 checkpoints, 1e-3);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      const Matrix m = matrix_exp(a, checkpoints[c]);
      const Matrix want = m * v0.to_matrix() * m.transpose();
      CHECK(relative_frobenius_error(got[c].to_matrix(), want) < 1e-10);
    }
  }
  SUBCASE("long-time limit solves the algebraic Lyapunov equation") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 3; ++trial) {
      const Matrix a = random_stable(rng, 8);
      Matrix d(8);
      for (std::size_t i = 0; i < 8; ++i) d(i, i) = 0.1 + i * 0.05;
      double decay = 1e300;
      for (const auto& l : eigenvalues(a)) decay = std::min(decay, -l.real());
      const auto got = integrate_frozen_covariance(
          Matrix8::from_matrix(a), Matrix8::from_matrix(d),
          CovarianceMatrix::from_matrix(Matrix::identity(8) * 0.5), {40.0 / decay}, 0.01);
      const Matrix want = solve_algebraic_lyapunov(a, d);
      CHECK(relative_frobenius_error(got.back().to_matrix(), want) < 1e-8);
    }
  }
  SUBCASE("checkpoint validation") {
    CHECK_THROWS_AS(integrate_frozen_covariance(Matrix8{}, Matrix8{}, CovarianceMatrix{},
                                                {1.0, 0.5}, 0.1),
                    DomainError);
    CHECK_THROWS_AS(integrate_frozen_covariance(Matrix8{}, Matrix8{}, CovarianceMatrix{},
                                                {0.0}, 0.1),
                    DomainError);
  }
}
