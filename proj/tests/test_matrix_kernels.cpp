#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "optosync/errors.hpp"
#include "optosync/matrix_kernels.hpp"
#include "test_support.hpp"

using namespace optosync;
using namespace optosync::testing;

namespace {

std::vector<std::complex<double>> sorted(std::vector<std::complex<double>> v) {
  std::sort(v.begin(), v.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

// det via Gaussian elimination, independent of lu_solve
double det(Matrix m) {
  const std::size_t n = m.size();
  double d = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      d = -d;
    }
    d *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return d;
}

} // namespace

TEST_CASE("matrix_exp closed forms") {
  SUBCASE("zero generator") {
    CHECK(matrix_exp(Matrix(5), 3.0) == Matrix::identity(5));
  }
  SUBCASE("diagonal") {
    const Matrix e = matrix_exp(Matrix{{0.3, 0.0}, {0.0, -1.7}}, 1.0);
    CHECK(rel_diff(e(0, 0), std::exp(0.3)) < 1e-14);
    CHECK(rel_diff(e(1, 1), std::exp(-1.7)) < 1e-14);
    CHECK(e(0, 1) == 0.0);
    CHECK(e(1, 0) == 0.0);
  }
  SUBCASE("rotation generator") {
    for (double t : {0.1, 1.0, 7.3, 500.0}) {
      const double w = 2.0;
      const Matrix e = matrix_exp(Matrix{{0.0, w}, {-w, 0.0}}, t);
      const Matrix expect{{std::cos(w * t), std::sin(w * t)}, {-std::sin(w * t), std::cos(w * t)}};
      CHECK(relative_frobenius_error(e, expect) < 1e-10);
    }
  }
  SUBCASE("large-norm upper triangular") {
    const double a = -500.0, b = 800.0, c = -300.0;
    const Matrix e = matrix_exp(Matrix{{a, b}, {0.0, c}}, 1.0);
    const Matrix expect{{std::exp(a), b * (std::exp(a) - std::exp(c)) / (a - c)},
                        {0.0, std::exp(c)}};
    CHECK(relative_frobenius_error(e, expect) < 1e-10);
  }
}

TEST_CASE("matrix_exp properties") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(rng, 8, 0.5);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    const double t1 = u(rng), t2 = u(rng);
    const Matrix lhs = matrix_exp(a, t1 + t2);
    const Matrix rhs = matrix_exp(a, t1) * matrix_exp(a, t2);
    CHECK(relative_frobenius_error(lhs, rhs) < 1e-9);

    const double h = 1e-6;
    const Matrix fd = (matrix_exp(a, t1 + h) - matrix_exp(a, t1 - h)) * (0.5 / h);
    CHECK(relative_frobenius_error(fd, a * matrix_exp(a, t1)) < 1e-6);
  }
}

TEST_CASE("lu_solve and cholesky") {
  const Matrix m{{4.0, 1.0, 0.0}, {1.0, 3.0, 1.0}, {0.0, 1.0, 2.0}};
  const auto x = lu_solve(m, std::vector<double>{1.0, 2.0, 3.0});
  const double r0 = 4 * x[0] + x[1] - 1.0;
  const double r1 = x[0] + 3 * x[1] + x[2] - 2.0;
  const double r2 = x[1] + 2 * x[2] - 3.0;
  CHECK(std::abs(r0) + std::abs(r1) + std::abs(r2) < 1e-14);
  CHECK_THROWS_AS(lu_solve(Matrix{{1.0, 2.0}, {2.0, 4.0}}, std::vector<double>{1.0, 1.0}),
                  DegenerateSystem);

  const Matrix l = cholesky(m);
  CHECK(relative_frobenius_error(l * l.transpose(), m) < 1e-15);
  CHECK(l(0, 1) == 0.0);
  CHECK_THROWS_AS(cholesky(Matrix{{1.0, 2.0}, {2.0, 1.0}}), DomainError);
}

TEST_CASE("eigenvalues") {
  SUBCASE("diagonal") {
    const auto ev = sorted(eigenvalues(Matrix{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}));
    for (int k = 0; k < 3; ++k) {
      CHECK(ev[k].real() == doctest::Approx(k + 1.0).epsilon(1e-14));
      CHECK(ev[k].imag() == 0.0);
    }
  }
  SUBCASE("rotation generator") {
    const auto ev = sorted(eigenvalues(Matrix{{0.0, 1.0}, {-1.0, 0.0}}));
    CHECK(std::abs(ev[0] - std::complex<double>(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(ev[1] - std::complex<double>(0.0, 1.0)) < 1e-14);
  }
  SUBCASE("companion matrix with known roots") {
    // (x - 1)(x + 2)(x - 3)(x^2 + 1) = x^5 - 2x^4 - 4x^3 + 4x^2 - 5x + 6
    const std::vector<double> c{-2.0, -4.0, 4.0, -5.0, 6.0};
    Matrix comp(5);
    for (std::size_t j = 0; j < 5; ++j) comp(0, j) = -c[j];
    for (std::size_t i = 1; i < 5; ++i) comp(i, i - 1) = 1.0;
    const auto ev = sorted(eigenvalues(comp));
    const std::vector<std::complex<double>> expect{{-2, 0}, {0, -1}, {0, 1}, {1, 0}, {3, 0}};
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(ev[k] - expect[k]) < 1e-10);
  }
  SUBCASE("random matrices: trace, determinant and characteristic roots") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 2 + trial % 15;
      const Matrix a = random_matrix(rng, n);
      const auto ev = eigenvalues(a);
      REQUIRE(ev.size() == n);
      std::complex<double> sum = 0.0, prod = 1.0;
      double trace = 0.0;
      for (std::size_t i = 0; i < n; ++i) trace += a(i, i);
      for (const auto& l : ev) {
        sum += l;
        prod *= l;
      }
      CHECK(std::abs(sum - trace) < 1e-10 * (1.0 + a.norm_inf()));
      CHECK(std::abs(prod - det(a)) < 1e-8 * (1.0 + std::abs(det(a))));
      CHECK(std::abs(sum.imag()) < 1e-10);
    }
  }
  SUBCASE("non-finite input") {
    Matrix a = Matrix::identity(3);
    a(1, 2) = std::nan("");
    CHECK_THROWS_AS(eigenvalues(a), DomainError);
  }
}

TEST_CASE("symmetric_eigenvalues") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = random_symmetric(rng, 1 + trial % 16);
    const auto ev = symmetric_eigenvalues(s);
    auto gen = eigenvalues(s);
    std::vector<double> re;
    for (auto l : gen) re.push_back(l.real());
    std::sort(re.begin(), re.end());
    for (std::size_t k = 0; k < ev.size(); ++k) CHECK(std::abs(ev[k] - re[k]) < 1e-10);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
  }
}

TEST_CASE("solve_algebraic_lyapunov") {
  SUBCASE("scalar fixed point") {
    const double kappa = 0.3, sigma2 = 1.7;
    const Matrix v = solve_algebraic_lyapunov(Matrix::identity(4) * -kappa,
                                              Matrix::identity(4) * (2 * kappa * sigma2));
    CHECK(relative_frobenius_error(v, Matrix::identity(4) * sigma2) < 1e-14);
  }
  SUBCASE("decoupled scalar equations") {
    const Matrix v = solve_algebraic_lyapunov(Matrix{{-1.0, 0.0}, {0.0, -2.0}},
                                              Matrix::identity(2));
    CHECK(v(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(v(0, 1) == 0.0);
  }
  SUBCASE("random stable systems satisfy the residual bound") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix a = random_stable(rng, 8);
      Matrix d = random_matrix(rng, 8);
      d = d * d.transpose();
      const Matrix v = solve_algebraic_lyapunov(a, d);
      const Matrix res = a * v + v * a.transpose() + d;
      CHECK(res.frobenius_norm() <=
            1e-10 * (a.frobenius_norm() * v.frobenius_norm() + d.frobenius_norm()));
      CHECK(v == v.transpose());
    }
  }
  SUBCASE("unstable drift") {
    CHECK_THROWS_AS(solve_algebraic_lyapunov(Matrix{{0.1, 0.0}, {0.0, -1.0}},
                                             Matrix::identity(2)),
                    UnstableSystem);
    CHECK_THROWS_AS(solve_algebraic_lyapunov(Matrix{{0.0, 1.0}, {-1.0, 0.0}},
                                             Matrix::identity(2)),
                    UnstableSystem);
  }
}

TEST_CASE("symplectic_eigenvalues") {
  SUBCASE("symplectic form") {
    const Matrix omega = symplectic_form(8);
    CHECK(omega.transpose() == omega * -1.0);
    CHECK(omega * omega == Matrix::identity(8) * -1.0);
  }
  SUBCASE("vacuum") {
    for (double nu : symplectic_eigenvalues(Matrix::identity(8) * 0.5))
      CHECK(nu == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("thermal mechanics with vacuum cavities") {
    const double n = 2.5;
    const auto nu = symplectic_eigenvalues(
        Matrix::diagonal({n + 0.5, n + 0.5, 0.5, 0.5, n + 0.5, n + 0.5, 0.5, 0.5}));
    REQUIRE(nu.size() == 4);
    CHECK(nu[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(nu[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(nu[2] == doctest::Approx(n + 0.5).epsilon(1e-14));
    CHECK(nu[3] == doctest::Approx(n + 0.5).epsilon(1e-14));
  }
  SUBCASE("single-mode squeezing, checked by a direct Omega V eigensolve") {
    const double r = 1.3;
    Matrix v = Matrix::identity(8) * 0.5;
    v(2, 2) = 0.5 * std::exp(2 * r);
    v(3, 3) = 0.5 * std::exp(-2 * r);
    const auto nu = symplectic_eigenvalues(v);
    for (double x : nu) CHECK(x == doctest::Approx(0.5).epsilon(1e-12));

    const auto direct = eigenvalues(symplectic_form(8) * v);
    for (const auto& l : direct) {
      CHECK(std::abs(l.real()) < 1e-12);
      CHECK(std::abs(std::abs(l.imag()) - 0.5) < 1e-12);
    }
  }
  SUBCASE("random states agree with the direct eigensolve and with rotations") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
      const Matrix v = random_physical_covariance(rng).to_matrix();
      const auto nu = symplectic_eigenvalues(v);
      std::vector<double> direct;
      for (const auto& l : eigenvalues(symplectic_form(8) * v))
        if (l.imag() > 0) direct.push_back(l.imag());
      std::sort(direct.begin(), direct.end());
      REQUIRE(direct.size() == 4);
      for (std::size_t k = 0; k < 4; ++k) CHECK(rel_diff(nu[k], direct[k]) < 1e-9);
      CHECK(nu[0] >= 0.5 - 1e-9);

      // mechanical phase-space rotations are symplectic
      Matrix r = Matrix::identity(8);
      const double a = 0.7 * trial, b = -0.3 * trial;
      r(0, 0) = std::cos(a); r(0, 1) = std::sin(a); r(1, 0) = -std::sin(a); r(1, 1) = std::cos(a);
      r(4, 4) = std::cos(b); r(4, 5) = std::sin(b); r(5, 4) = -std::sin(b); r(5, 5) = std::cos(b);
      Matrix rv = r * v * r.transpose();
      rv = 0.5 * (rv + rv.transpose());
      const auto rotated = symplectic_eigenvalues(rv);
      for (std::size_t k = 0; k < 4; ++k) CHECK(rel_diff(nu[k], rotated[k]) < 1e-10);
    }
  }
  SUBCASE("not positive definite") {
    Matrix v = Matrix::identity(4) * 0.5;
    v(0, 0) = -1.0;
    CHECK_THROWS_AS(symplectic_eigenvalues(v), DomainError);
  }
}
