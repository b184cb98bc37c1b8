#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace optosync {

/// Dense square matrix, row-major. Sized for the small systems used here
/// (n <= 16; the vectorized Lyapunov system reaches n^2).
class Matrix {
public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const std::vector<double>& diag);

  std::size_t size() const noexcept { return n_; }

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < n_ && j < n_);
    return data_[i * n_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < n_ && j < n_);
    return data_[i * n_ + j];
  }

  const std::vector<double>& data() const noexcept { return data_; }

  Matrix transpose() const;
  double frobenius_norm() const;
  /// Maximum absolute row sum.
  double norm_inf() const;
  double max_abs() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
  friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
  friend Matrix operator*(Matrix lhs, double s) { return lhs *= s; }
  friend Matrix operator*(double s, Matrix rhs) { return rhs *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// ||a - b||_F / ||b||_F, or the absolute norm when b is zero.
double relative_frobenius_error(const Matrix& a, const Matrix& b);

} // namespace optosync
