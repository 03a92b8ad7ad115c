#pragma once

// Orthogonal discriminant directions.
//
// d1 maximizes the primary Fisher ratio dᵀS_B d / dᵀS_W d and has the closed
// form α·S_W⁻¹ s_b. d2 maximizes the protected-attribute ratio over the
// hyperplane orthogonal to d1. The constrained problem is solved on an
// explicit orthonormal basis Q of that hyperplane:
//
//   (Qᵀ S_B† Q) v = μ (Qᵀ S_W† Q) v,   d2 = Q v.
//
// The same d2 satisfies the deflated problem (S_B† − K₁) d2 = μ S_W† d2 with
// the rank-one K₁ = d1 d1ᵀ [S_W†]⁻¹ S_B† / (d1ᵀ [S_W†]⁻¹ d1); that identity is
// exposed through deflation_matrix() and deflation_residual() and used as a
// check, not as the solution route.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "orthofair/dataset.hpp"
#include "orthofair/error.hpp"
#include "orthofair/matrix.hpp"
#include "orthofair/numkernel.hpp"
#include "orthofair/scatter.hpp"

namespace orthofair {

/// Flips v so that its largest-magnitude entry (first one on ties) is positive.
inline Vector canonical_sign(Vector v) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[k])) k = i;
  if (!v.empty() && v[k] < 0.0)
    for (double& x : v) x = -x;
  return v;
}

inline double rayleigh_quotient(const SymMatrix& num, const SymMatrix& den, std::span<const double> d) {
  return num.quadratic_form(d) / den.quadratic_form(d);
}

struct DiscriminantBasis {
  Vector d1;
  Vector d2;
  double mu = 0.0;
  double alpha1 = 0.0;
  double gamma = 0.0;
  double fisher_primary = 0.0;
  double fisher_protected = 0.0;
  /// Gap between the two largest reduced eigenvalues; +inf when M = 2.
  double eigengap = std::numeric_limits<double>::infinity();

  std::size_t dim() const noexcept { return d1.size(); }
};

struct FisherDirection {
  Vector d1;
  double alpha1 = 0.0;
};

inline FisherDirection fisher_direction(const ScatterSet& primary) {
  double scale = std::sqrt(std::max(primary.within.trace(), 0.0) /
                           static_cast<double>(std::max<std::size_t>(primary.total(), 1)));
  for (const auto& mean : primary.class_means) scale = std::max(scale, norm2(mean));
  if (norm2(primary.mean_diff) <= 1e-12 * scale)
    throw Error(Errc::ZeroMeanDifference, "primary class means coincide");

  const Vector raw = solve_spd(primary.within, primary.mean_diff);
  const double nrm = norm2(raw);
  FisherDirection out;
  out.alpha1 = 1.0 / nrm;
  out.d1 = canonical_sign(scaled(raw, out.alpha1));
  return out;
}

inline Matrix deflation_matrix(std::span<const double> d1, const ScatterSet& protected_scatter) {
  const std::size_t m = protected_scatter.dim();
  if (d1.size() != m) throw Error(Errc::DimensionMismatch, "direction length does not match scatter order");
  const Vector u = solve_spd(protected_scatter.within, d1);  // [S_W†]⁻¹ d1
  const double denom = dot(d1, u);
  const Vector r = multiply_transposed(protected_scatter.between.matrix(), u);  // (uᵀ S_B†)ᵀ
  Matrix k = outer(d1, r);
  for (double& x : k.data()) x /= denom;
  return k;
}

/// ‖(S_B† − K₁) d − μ S_W† d‖₂
inline double deflation_residual(const Matrix& k1, const ScatterSet& protected_scatter,
                                 std::span<const double> d, double mu) {
  const Vector lhs = multiply(subtract(protected_scatter.between.matrix(), k1), d);
  const Vector rhs = multiply(protected_scatter.within.matrix(), d);
  Vector diff(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) diff[i] = lhs[i] - mu * rhs[i];
  return norm2(diff);
}

struct SecondDirection {
  Vector d2;
  double mu = 0.0;
  double eigengap = std::numeric_limits<double>::infinity();
};

inline SecondDirection second_direction(std::span<const double> d1, const ScatterSet& protected_scatter) {
  const std::size_t m = protected_scatter.dim();
  if (m < 2) throw Error(Errc::DegenerateDirection, "a second direction needs at least 2 features");
  if (d1.size() != m) throw Error(Errc::DimensionMismatch, "direction length does not match scatter order");

  const Matrix q = complement_basis(d1, m);
  const SymMatrix reduced_between = congruence(q, protected_scatter.between);
  const SymMatrix reduced_within = congruence(q, protected_scatter.within);
  const auto pairs = gen_sym_eigen(reduced_between, reduced_within);

  SecondDirection out;
  out.mu = std::max(pairs.front().value, 0.0);
  if (pairs.size() > 1) out.eigengap = pairs[0].value - pairs[1].value;
  Vector d2 = multiply(q, pairs.front().vector);
  const double nrm = norm2(d2);
  for (double& x : d2) x /= nrm;
  out.d2 = canonical_sign(std::move(d2));
  return out;
}

struct ProjectedDataset {
  Matrix Z;  // N×2: (d1ᵀx, d2ᵀx)
  std::vector<int> y;
  std::vector<int> a;
  std::vector<std::string> ids;
};

inline Matrix project_rows(const Matrix& x, const DiscriminantBasis& basis) {
  if (x.cols() != basis.dim()) throw Error(Errc::DimensionMismatch, "feature dimension does not match basis");
  Matrix z(x.rows(), 2);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    z(i, 0) = dot(basis.d1, x.row(i));
    z(i, 1) = dot(basis.d2, x.row(i));
  }
  return z;
}

inline ProjectedDataset project(const FeatureDataset& data, const DiscriminantBasis& basis) {
  return {project_rows(data.X, basis), data.y, data.a, data.ids};
}

/// Both scatters, shrinkage, d1 and d2 for a dataset. If a within-class scatter
/// is not positive definite at the requested shrinkage, shrinkage is raised
/// (first to 1e-6, then ×10 per attempt, up to 1) with a warning; the value
/// actually used is recorded in the basis.
inline DiscriminantBasis fit_basis(const FeatureDataset& data, double gamma) {
  constexpr double kDefaultShrinkage = 1e-6;
  const ScatterSet primary_raw = compute_scatters(data, Labeling::Primary);
  const ScatterSet protected_raw = compute_scatters(data, Labeling::Protected);

  double g = gamma;
  for (;;) {
    try {
      const ScatterSet primary = shrink_within(primary_raw, g);
      const ScatterSet prot = shrink_within(protected_raw, g);
      const FisherDirection fd = fisher_direction(primary);
      const SecondDirection sd = second_direction(fd.d1, prot);

      DiscriminantBasis basis;
      basis.d1 = fd.d1;
      basis.alpha1 = fd.alpha1;
      basis.d2 = sd.d2;
      basis.mu = sd.mu;
      basis.eigengap = sd.eigengap;
      basis.gamma = g;
      basis.fisher_primary = rayleigh_quotient(primary.between, primary.within, basis.d1);
      basis.fisher_protected = rayleigh_quotient(prot.between, prot.within, basis.d2);
      return basis;
    } catch (const Error& e) {
      if (e.code() != Errc::NotPositiveDefinite || g >= 1.0) throw;
      const double next = g < kDefaultShrinkage ? kDefaultShrinkage : std::min(10.0 * g, 1.0);
      warn("within-class scatter is singular at shrinkage " + std::to_string(g) +
           "; retrying with " + std::to_string(next));
      g = next;
    }
  }
}

}  // namespace orthofair
