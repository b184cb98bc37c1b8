#pragma once

#include <complex>
#include <vector>

#include "optosync/matrix.hpp"

namespace optosync {

/// exp(A t) by scaling and squaring around a [6/6] Pade approximant.
Matrix matrix_exp(const Matrix& a, double t);

/// Solves M X = B for X (B holds the right-hand sides column-wise) with
/// partial-pivoting LU. Throws DegenerateSystem on a zero pivot.
Matrix lu_solve(const Matrix& m, const Matrix& b);
std::vector<double> lu_solve(const Matrix& m, std::vector<double> b);

/// Unique symmetric V with A V + V A^T + D = 0 for Hurwitz-stable A.
///
/// Solved through the Kronecker form (I (x) A + A (x) I) vec(V) = -vec(D),
/// which is only sensible for the small n used here. The residual is
/// checked on every call.
///
/// Throws UnstableSystem if A has an eigenvalue with Re >= 0,
/// DegenerateSystem if the vectorized system is singular and
/// NumericalFailure if the residual check fails.
Matrix solve_algebraic_lyapunov(const Matrix& a, const Matrix& d);

/// All eigenvalues of a general real matrix (balancing, Householder
/// Hessenberg reduction, then Francis double-shift QR). Order follows
/// deflation and is not sorted.
/// Throws NumericalFailure if QR does not converge within 100 n sweeps.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi, sorted ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& s);

/// Lower-triangular L with L L^T = V. Throws DomainError if V is not
/// positive definite.
Matrix cholesky(const Matrix& v);

/// Block-diagonal form with [[0, 1], [-1, 0]] on each consecutive index
/// pair, matching the (q, p) and (x, y) pairs of the quadrature ordering.
Matrix symplectic_form(std::size_t n);

/// Symplectic spectrum of a positive definite covariance matrix: the
/// moduli of the eigenvalues of i Omega V, one per mode, ascending.
/// Throws DomainError if V is not symmetric positive definite.
std::vector<double> symplectic_eigenvalues(const Matrix& v);

} // namespace optosync
