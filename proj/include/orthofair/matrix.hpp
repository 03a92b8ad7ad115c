#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orthofair/error.hpp"

namespace orthofair {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw Error(Errc::DimensionMismatch, "matrix data size does not match shape");
  }
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(Errc::DimensionMismatch, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> values) {
    Matrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  Vector column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, std::span<const double> values) {
    assert(values.size() == rows_);
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> v) {
  // scaled accumulation so huge/tiny feature magnitudes do not overflow
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) {
    const double r = x / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

inline double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

inline Vector multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(Errc::DimensionMismatch, "matrix-vector shape mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

/// y = aᵀ x
inline Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw Error(Errc::DimensionMismatch, "matrix-vector shape mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::DimensionMismatch, "matrix-matrix shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Matrix outer(std::span<const double> u, std::span<const double> v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

inline Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(Errc::DimensionMismatch, "matrix shape mismatch");
  Matrix c = a;
  for (std::size_t k = 0; k < c.data().size(); ++k) c.data()[k] -= b.data()[k];
  return c;
}

inline Vector subtract(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  Vector c(a.begin(), a.end());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
  return c;
}

inline Vector scaled(std::span<const double> v, double s) {
  Vector r(v.begin(), v.end());
  for (double& x : r) x *= s;
  return r;
}

/// Symmetric matrix. Entries are stored in full and are exactly symmetric and finite.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : m_(n, n) {}

  /// Validates exact symmetry and finiteness.
  explicit SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw Error(Errc::DimensionMismatch, "symmetric matrix must be square");
    for (std::size_t i = 0; i < m_.rows(); ++i)
      for (std::size_t j = 0; j < m_.cols(); ++j) {
        if (!std::isfinite(m_(i, j)))
          throw Error(Errc::InvalidArgument, "symmetric matrix has a non-finite entry");
        if (j > i && m_(i, j) != m_(j, i))
          throw Error(Errc::InvalidArgument, "matrix is not exactly symmetric");
      }
  }

  SymMatrix(std::initializer_list<std::initializer_list<double>> rows) : SymMatrix(Matrix(rows)) {}

  /// Builds from an approximately symmetric matrix by averaging mirrored entries.
  static SymMatrix symmetrized(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, "symmetric matrix must be square");
    Matrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      s(i, i) = m(i, i);
      for (std::size_t j = i + 1; j < m.cols(); ++j) {
        const double v = 0.5 * (m(i, j) + m(j, i));
        s(i, j) = v;
        s(j, i) = v;
      }
    }
    return SymMatrix(std::move(s));
  }

  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

  std::size_t order() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }

  /// Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Matrix& matrix() const noexcept { return m_; }

  double trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < order(); ++i) t += m_(i, i);
    return t;
  }

  double quadratic_form(std::span<const double> v) const {
    return dot(v, multiply(m_, v));
  }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

/// Congruence Qᵀ A Q, returned exactly symmetric.
inline SymMatrix congruence(const Matrix& q, const SymMatrix& a) {
  return SymMatrix::symmetrized(multiply(q.transposed(), multiply(a.matrix(), q)));
}

}  // namespace orthofair
