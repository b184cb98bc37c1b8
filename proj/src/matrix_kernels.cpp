#include "optosync/matrix_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "optosync/errors.hpp"

namespace optosync {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double copy_sign(double magnitude, double sign) {
  return sign >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

struct LuFactors {
  Matrix lu;
  std::vector<std::size_t> perm;
};

LuFactors lu_factor(Matrix m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const double scale = std::max(m.max_abs(), std::numeric_limits<double>::min());

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > std::abs(m(pivot, k))) {
        pivot = i;
      }
    }
    if (std::abs(m(pivot, k)) <= kEps * scale * static_cast<double>(n)) {
      throw DegenerateSystem("lu_solve: matrix is singular to working precision");
    }
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(k, j), m(pivot, j));
      }
      std::swap(perm[k], perm[pivot]);
    }
    const double inv = 1.0 / m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) * inv;
      m(i, k) = f;
      if (f == 0.0) {
        continue;
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) -= f * m(k, j);
      }
    }
  }
  return {std::move(m), std::move(perm)};
}

std::vector<double> lu_apply(const LuFactors& f, const std::vector<double>& b) {
  const std::size_t n = f.lu.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[f.perm[i]];
    for (std::size_t j = 0; j < i; ++j) {
      s -= f.lu(i, j) * x[j];
    }
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) {
      s -= f.lu(ii, j) * x[j];
    }
    x[ii] = s / f.lu(ii, ii);
  }
  return x;
}

// Permutes and scales rows/columns by powers of two so that row and
// column norms are comparable. Eigenvalues are unchanged.
void balance(Matrix& a) {
  constexpr double radix = 2.0;
  const std::size_t n = a.size();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      }
      if (c == 0.0 || r == 0.0) {
        continue;
      }
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) {
          a(i, j) *= g;
        }
        for (std::size_t j = 0; j < n; ++j) {
          a(j, i) *= f;
        }
      }
    }
  }
}

void householder_hessenberg(Matrix& a) {
  const std::size_t n = a.size();
  if (n < 3) {
    return;
  }
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      norm += a(i, k) * a(i, k);
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      continue;
    }
    const double alpha = -copy_sign(norm, a(k + 1, k));
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k);
    }
    v[k + 1] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) {
      continue;
    }
    const double beta = 2.0 / vnorm2;
    // A <- H A
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) {
        s += v[i] * a(i, j);
      }
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) {
        a(i, j) -= s * v[i];
      }
    }
    // A <- A H
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) {
        s += a(i, j) * v[j];
      }
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) -= s * v[j];
      }
    }
    for (std::size_t i = k + 2; i < n; ++i) {
      a(i, k) = 0.0;
    }
  }
}

// Francis double-shift QR on an upper Hessenberg matrix, overwriting it.
std::vector<std::complex<double>> hessenberg_qr(Matrix& a) {
  const int n = static_cast<int>(a.size());
  std::vector<std::complex<double>> w(a.size());
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) {
      anorm += std::abs(a(i, j));
    }
  }
  const int max_total = 100 * std::max(n, 1);
  int total = 0;
  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) {
          s = anorm;
        }
        if (std::abs(a(l, l - 1)) <= kEps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        w[nn--] = x + t;
      } else {
        double y = a(nn - 1, nn - 1);
        double ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + ww;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + copy_sign(z, p);
            w[nn - 1] = w[nn] = x + z;
            if (z != 0.0) {
              w[nn] = x - ww / z;
            }
          } else {
            w[nn] = {x + p, -z};
            w[nn - 1] = std::conj(w[nn]);
          }
          nn -= 2;
        } else {
          if (++total > max_total) {
            throw NumericalFailure("eigenvalues: QR iteration did not converge");
          }
          if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) {
              a(i, i) -= x;
            }
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) {
              break;
            }
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                            std::abs(a(m + 1, m + 1)));
            if (u <= kEps * v) {
              break;
            }
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) {
              a(i + 2, i - 1) = 0.0;
            }
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) {
                r = a(k + 2, k - 1);
              }
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = copy_sign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) {
              continue;
            }
            if (k == m) {
              if (l != m) {
                a(k, k - 1) = -a(k, k - 1);
              }
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k + 1 != nn) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k + 1 != nn) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

} // namespace

Matrix lu_solve(const Matrix& m, const Matrix& b) {
  const auto f = lu_factor(m);
  const std::size_t n = m.size();
  Matrix x(n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = b(i, j);
    }
    const auto sol = lu_apply(f, col);
    for (std::size_t i = 0; i < n; ++i) {
      x(i, j) = sol[i];
    }
  }
  return x;
}

std::vector<double> lu_solve(const Matrix& m, std::vector<double> b) {
  return lu_apply(lu_factor(m), b);
}

Matrix matrix_exp(const Matrix& a, double t) {
  const std::size_t n = a.size();
  Matrix x = a * t;
  const double norm = x.norm_inf();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    x *= std::ldexp(1.0, -squarings);
  }

  constexpr int order = 6;
  Matrix numer = Matrix::identity(n);
  Matrix denom = Matrix::identity(n);
  Matrix power = Matrix::identity(n);
  double c = 1.0;
  for (int k = 1; k <= order; ++k) {
    c *= static_cast<double>(order - k + 1) /
         static_cast<double>(k * (2 * order - k + 1));
    power = power * x;
    numer += c * power;
    denom += ((k % 2 == 0) ? c : -c) * power;
  }
  Matrix result = lu_solve(denom, numer);
  for (int s = 0; s < squarings; ++s) {
    result = result * result;
  }
  return result;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  if (!a.all_finite()) {
    throw DomainError("eigenvalues: matrix has non-finite entries");
  }
  Matrix h = a;
  balance(h);
  householder_hessenberg(h);
  return hessenberg_qr(h);
}

std::vector<double> symmetric_eigenvalues(const Matrix& s) {
  const std::size_t n = s.size();
  Matrix a = s;
  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += a(i, i) * a(i, i);
      for (std::size_t j = i + 1; j < n; ++j) {
        off += a(i, j) * a(i, j);
      }
    }
    if (off <= kEps * kEps * (diag + off)) {
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = a(i, i);
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) {
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double tan = copy_sign(1.0, theta) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cos = 1.0 / std::sqrt(tan * tan + 1.0);
        const double sin = tan * cos;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = cos * akp - sin * akq;
          a(k, q) = sin * akp + cos * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = cos * apk - sin * aqk;
          a(q, k) = sin * apk + cos * aqk;
        }
      }
    }
  }
  throw NumericalFailure("symmetric_eigenvalues: Jacobi sweeps did not converge");
}

Matrix cholesky(const Matrix& v) {
  const std::size_t n = v.size();
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = v(j, j);
    for (std::size_t k = 0; k < j; ++k) {
      d -= l(j, k) * l(j, k);
    }
    if (!(d > 0.0)) {
      throw DomainError("cholesky: matrix is not positive definite");
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = v(i, j);
      for (std::size_t k = 0; k < j; ++k) {
        s -= l(i, k) * l(j, k);
      }
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Matrix symplectic_form(std::size_t n) {
  if (n % 2 != 0) {
    throw DomainError("symplectic_form: dimension must be even");
  }
  Matrix omega(n);
  for (std::size_t k = 0; k < n; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

std::vector<double> symplectic_eigenvalues(const Matrix& v) {
  const std::size_t n = v.size();
  if (n % 2 != 0) {
    throw DomainError("symplectic_eigenvalues: dimension must be even");
  }
  const double scale = v.max_abs();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(v(i, j) - v(j, i)) > 1e-12 * std::max(scale, 1.0)) {
        throw DomainError("symplectic_eigenvalues: matrix is not symmetric");
      }
    }
  }
  // Omega V is similar to the antisymmetric L^T Omega L (V = L L^T), whose
  // eigenvalues are +-i nu. M^T M = -M^2 then carries nu^2 twice each.
  const Matrix l = cholesky(v);
  const Matrix m = l.transpose() * symplectic_form(n) * l;
  const auto squares = symmetric_eigenvalues(m.transpose() * m);
  std::vector<double> nu(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double a = std::max(squares[2 * k], 0.0);
    const double b = std::max(squares[2 * k + 1], 0.0);
    nu[k] = 0.5 * (std::sqrt(a) + std::sqrt(b));
  }
  return nu;
}

Matrix solve_algebraic_lyapunov(const Matrix& a, const Matrix& d) {
  const std::size_t n = a.size();
  if (d.size() != n) {
    throw DomainError("solve_algebraic_lyapunov: A and D sizes differ");
  }
  for (const auto& lambda : eigenvalues(a)) {
    if (!(lambda.real() < 0.0)) {
      throw UnstableSystem("solve_algebraic_lyapunov: drift matrix is not Hurwitz-stable");
    }
  }

  // Row-major vec: index (i, j) -> i n + j.
  Matrix kron(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t k = 0; k < n; ++k) {
        kron(row, k * n + j) += a(i, k); // (A V)_ij
        kron(row, i * n + k) += a(j, k); // (V A^T)_ij
      }
    }
  }
  std::vector<double> rhs(n * n);
  for (std::size_t k = 0; k < n * n; ++k) {
    rhs[k] = -d.data()[k];
  }
  const auto sol = lu_solve(kron, std::move(rhs));

  Matrix v(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      v(i, j) = 0.5 * (sol[i * n + j] + sol[j * n + i]);
    }
  }

  const Matrix residual = a * v + v * a.transpose() + d;
  const double bound =
      1e-10 * (a.frobenius_norm() * v.frobenius_norm() + d.frobenius_norm());
  if (!(residual.frobenius_norm() <= bound)) {
    throw NumericalFailure("solve_algebraic_lyapunov: residual check failed");
  }
  return v;
}

} // namespace optosync
