#pragma once

// Dense symmetric kernels: Cholesky, SPD solves, cyclic Jacobi eigensolver,
// symmetric-definite generalized eigensolver and orthogonal complements.
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "orthofair/error.hpp"
#include "orthofair/matrix.hpp"

namespace orthofair {

struct EigenPair {
  double value = 0.0;
  Vector vector;  // unit 2-norm
};

/// Lower-triangular L with A = L Lᵀ. A pivot at or below 1e-14·trace(A)/n is
/// reported as NotPositiveDefinite with the pivot index.
inline Matrix cholesky_spd(const SymMatrix& a) {
  const std::size_t n = a.order();
  Matrix l(n, n);
  if (n == 0) return l;
  const double floor = 1e-14 * a.trace() / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > floor) || !(pivot > 0.0))
      throw Error(Errc::NotPositiveDefinite,
                  "Cholesky pivot " + std::to_string(j) + " is not positive", j);
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

namespace detail {

// Solves L x = b in place.
inline void forward_substitute(const Matrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
}

// Solves Lᵀ x = b in place.
inline void back_substitute_transposed(const Matrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
}

}  // namespace detail

/// x = L⁻ᵀ L⁻¹ b for an existing Cholesky factor.
inline Vector cholesky_solve(const Matrix& l, std::span<const double> b) {
  if (l.rows() != b.size()) throw Error(Errc::DimensionMismatch, "right-hand side length mismatch");
  Vector x(b.begin(), b.end());
  detail::forward_substitute(l, x);
  detail::back_substitute_transposed(l, x);
  return x;
}

inline Vector solve_spd(const SymMatrix& a, std::span<const double> b) {
  if (a.order() != b.size()) throw Error(Errc::DimensionMismatch, "right-hand side length mismatch");
  return cholesky_solve(cholesky_spd(a), b);
}

/// All eigenpairs of a symmetric matrix, values descending, by cyclic Jacobi
/// rotations. Stops once the off-diagonal Frobenius norm is at most
/// 1e-12·‖A‖_F; throws ConvergenceFailure after 50·n sweeps.
inline std::vector<EigenPair> sym_eigen(const SymMatrix& input) {
  const std::size_t n = input.order();
  Matrix a = input.matrix();
  Matrix v = Matrix::identity(n);
  const double target = 1e-12 * frobenius_norm(a);
  const std::size_t max_sweeps = std::max<std::size_t>(50 * n, 50);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
    return std::sqrt(2.0 * s);
  };

  std::size_t sweep = 0;
  for (; off_norm() > target; ++sweep) {
    if (sweep >= max_sweeps)
      throw Error(Errc::ConvergenceFailure,
                  "Jacobi eigensolver exceeded " + std::to_string(max_sweeps) + " sweeps", sweep);
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double nkp = c * akp - s * akq;
          const double nkq = s * akp + c * akq;
          a(k, p) = nkp;
          a(p, k) = nkp;
          a(k, q) = nkq;
          a(q, k) = nkq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  std::vector<EigenPair> pairs;
  pairs.reserve(n);
  for (std::size_t idx : order) {
    Vector vec = v.column(idx);
    const double nrm = norm2(vec);
    for (double& x : vec) x /= nrm;
    pairs.push_back({a(idx, idx), std::move(vec)});
  }
  return pairs;
}

/// Eigenpairs of A v = λ B v (A symmetric, B SPD), values descending, via the
/// whitened problem L⁻¹ A L⁻ᵀ with B = L Lᵀ. Vectors are scaled to unit 2-norm;
/// they are mutually B-orthogonal.
inline std::vector<EigenPair> gen_sym_eigen(const SymMatrix& a, const SymMatrix& b) {
  const std::size_t n = a.order();
  if (b.order() != n) throw Error(Errc::DimensionMismatch, "generalized eigenproblem order mismatch");
  const Matrix l = cholesky_spd(b);

  // Y = L⁻¹ A column by column, then C = L⁻¹ Yᵀ.
  Matrix y(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector col = a.matrix().column(j);
    detail::forward_substitute(l, col);
    y.set_column(j, col);
  }
  Matrix c(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = y(j, i);
    detail::forward_substitute(l, col);
    c.set_column(j, col);
  }

  auto pairs = sym_eigen(SymMatrix::symmetrized(c));
  for (auto& pair : pairs) {
    detail::back_substitute_transposed(l, pair.vector);
    const double nrm = norm2(pair.vector);
    for (double& x : pair.vector) x /= nrm;
  }
  return pairs;
}

/// n×(n−1) matrix whose orthonormal columns span the orthogonal complement of
/// the unit vector d. Built from the Householder reflector H that maps d onto
/// −sign(d_k)·e_k, k the first index of largest |d_k|; column k of H is dropped.
inline Matrix complement_basis(std::span<const double> d, std::size_t n) {
  if (d.size() != n) throw Error(Errc::DimensionMismatch, "direction length does not match dimension");
  if (n == 0) throw Error(Errc::DegenerateDirection, "empty direction");
  if (std::abs(norm2(d) - 1.0) > 1e-10)
    throw Error(Errc::DegenerateDirection, "direction is not unit norm");

  std::size_t k = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(d[i]) > std::abs(d[k])) k = i;

  Vector w(d.begin(), d.end());
  w[k] += d[k] >= 0.0 ? 1.0 : -1.0;
  const double wtw = dot(w, w);

  Matrix q(n, n - 1);
  std::size_t out = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == k) continue;
    const double f = 2.0 * w[j] / wtw;
    for (std::size_t i = 0; i < n; ++i) q(i, out) = (i == j ? 1.0 : 0.0) - f * w[i];
    ++out;
  }
  return q;
}

}  // namespace orthofair
