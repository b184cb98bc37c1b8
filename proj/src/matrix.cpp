#include "optosync/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace optosync {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()), data_() {
  data_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) {
      throw std::invalid_argument("Matrix: initializer must be square");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

Matrix Matrix::diagonal(const std::vector<double>& diag) {
  Matrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    m(i, i) = diag[i];
  }
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      t(j, i) = (*this)(i, j);
    }
  }
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) {
    s += v * v;
  }
  return std::sqrt(s);
}

double Matrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      row += std::abs((*this)(i, j));
    }
    best = std::max(best, row);
  }
  return best;
}

double Matrix::max_abs() const {
  double best = 0.0;
  for (double v : data_) {
    best = std::max(best, std::abs(v));
  }
  return best;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  if (rhs.n_ != n_) {
    throw std::invalid_argument("Matrix: size mismatch in +");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    data_[k] += rhs.data_[k];
  }
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  if (rhs.n_ != n_) {
    throw std::invalid_argument("Matrix: size mismatch in -");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    data_[k] -= rhs.data_[k];
  }
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) {
    v *= s;
  }
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.n_ != b.n_) {
    throw std::invalid_argument("Matrix: size mismatch in *");
  }
  const std::size_t n = a.n_;
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) {
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

double relative_frobenius_error(const Matrix& a, const Matrix& b) {
  const double diff = (a - b).frobenius_norm();
  const double ref = b.frobenius_norm();
  return ref > 0.0 ? diff / ref : diff;
}

} // namespace optosync
