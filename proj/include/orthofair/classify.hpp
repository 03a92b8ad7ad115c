#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orthofair/dataset.hpp"
#include "orthofair/error.hpp"
#include "orthofair/matrix.hpp"
#include "orthofair/orthodisc.hpp"

namespace orthofair {

/// Which coordinates feed the classifier.
enum class ProjectionMode {
  PrimaryOnly,   // d1ᵀx only
  Full2d,        // (d1ᵀx, d2ᵀx)
  FullFeatures,  // raw M-dimensional features (baseline without reduction)
};

inline std::string_view mode_name(ProjectionMode mode) noexcept {
  switch (mode) {
    case ProjectionMode::PrimaryOnly: return "primary-only";
    case ProjectionMode::Full2d: return "full-2d";
    case ProjectionMode::FullFeatures: return "full-features";
  }
  return "unknown";
}

inline ProjectionMode parse_mode(std::string_view s) {
  if (s == "primary-only") return ProjectionMode::PrimaryOnly;
  if (s == "full-2d") return ProjectionMode::Full2d;
  if (s == "full-features") return ProjectionMode::FullFeatures;
  throw Error(Errc::InvalidArgument, "unknown projection mode '" + std::string(s) + "'");
}

/// Classifier inputs for a mode: N×1, N×2 or N×M.
inline Matrix mode_coordinates(ProjectionMode mode, const DiscriminantBasis& basis, const Matrix& x) {
  switch (mode) {
    case ProjectionMode::FullFeatures:
      if (x.cols() != basis.dim())
        throw Error(Errc::DimensionMismatch, "feature dimension does not match model");
      return x;
    case ProjectionMode::Full2d:
      return project_rows(x, basis);
    case ProjectionMode::PrimaryOnly: {
      if (x.cols() != basis.dim())
        throw Error(Errc::DimensionMismatch, "feature dimension does not match basis");
      Matrix z(x.rows(), 1);
      for (std::size_t i = 0; i < x.rows(); ++i) z(i, 0) = dot(basis.d1, x.row(i));
      return z;
    }
  }
  throw Error(Errc::InvalidArgument, "unknown projection mode");
}

struct Scaler {
  Vector mean;
  Vector sd;

  static Scaler identity(std::size_t dim) { return {Vector(dim, 0.0), Vector(dim, 1.0)}; }
  friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// Per-column mean and population standard deviation.
inline Scaler fit_scaler(const Matrix& z) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  Scaler s{Vector(d, 0.0), Vector(d, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += z(i, j);
  for (double& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = z(i, j) - s.mean[j];
      s.sd[j] += dev * dev;
    }
  for (std::size_t j = 0; j < d; ++j) {
    s.sd[j] = std::sqrt(s.sd[j] / static_cast<double>(n));
    if (!(s.sd[j] > 1e-13 * std::abs(s.mean[j])) || s.sd[j] == 0.0)
      throw Error(Errc::ZeroVariance, "coordinate " + std::to_string(j) + " has zero variance", j);
  }
  return s;
}

inline Matrix standardize(const Matrix& z, const Scaler& scaler) {
  if (z.cols() != scaler.mean.size())
    throw Error(Errc::DimensionMismatch, "scaler dimension does not match coordinates");
  Matrix out(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) out(i, j) = (z(i, j) - scaler.mean[j]) / scaler.sd[j];
  return out;
}

struct SvmSolution {
  Vector w;
  double b = 0.0;
  double objective = 0.0;
};

/// ½‖w‖² + C·Σ max(0, 1 − tᵢ(w·zᵢ + b)), tᵢ = 2yᵢ − 1.
inline double svm_objective(const Matrix& z, std::span<const int> y, double c,
                            std::span<const double> w, double b) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const double t = y[i] == 1 ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - t * (dot(w, z.row(i)) + b));
  }
  return 0.5 * dot(w, w) + c * hinge;
}

struct SvmOptions {
  /// Smoothing widths are 1, 0.1, ... down to this value.
  double final_smoothing = 1e-9;
  /// Newton iterations allowed per smoothing width.
  std::size_t max_newton_iterations = 100;
};

namespace detail {

// Gaussian elimination with partial pivoting on a small dense system.
inline Vector solve_dense(Matrix a, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

// Hinge with its kink replaced by a quadratic of width mu; within mu/2 of the hinge.
inline double smoothed_hinge(double margin, double mu) {
  if (margin >= 1.0) return 0.0;
  if (margin > 1.0 - mu) return (1.0 - margin) * (1.0 - margin) / (2.0 * mu);
  return 1.0 - margin - 0.5 * mu;
}

}  // namespace detail

/// Linear soft-margin SVM, minimizing ½‖w‖² + C·Σ max(0, 1 − tᵢ(w·zᵢ + b)).
///
/// Damped Newton on the smoothed-hinge objective, started at w = 0, b = 0 and
/// continued over smoothing widths 1, 0.1, ..., final_smoothing with warm
/// starts. The smoothed objective is within C·N·μ/2 of the hinge objective, so
/// the result is optimal to that bound. Deterministic.
inline SvmSolution train_svm(const Matrix& z, std::span<const int> y, double c,
                             const SvmOptions& options = {}) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  const std::size_t p = d + 1;  // weights then bias
  if (y.size() != n) throw Error(Errc::DimensionMismatch, "label count does not match samples");
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(Errc::InvalidArgument, "C must be positive");
  bool has[2] = {false, false};
  for (int v : y) has[v == 1] = true;
  if (!has[0] || !has[1]) throw Error(Errc::SingleClass, "SVM training needs both classes");

  Vector theta(p, 0.0);
  auto margin = [&](const Vector& th, std::size_t i) {
    const double t = y[i] == 1 ? 1.0 : -1.0;
    return t * (dot(std::span<const double>(th.data(), d), z.row(i)) + th[d]);
  };
  auto smoothed_objective = [&](const Vector& th, double mu) {
    double f = 0.0;
    for (std::size_t j = 0; j < d; ++j) f += 0.5 * th[j] * th[j];
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += detail::smoothed_hinge(margin(th, i), mu);
    return f + c * loss;
  };

  Vector grad(p);
  Matrix hess(p, p);
  for (double mu = 1.0; mu >= 0.99 * options.final_smoothing; mu *= 0.1) {
    for (std::size_t it = 0; it < options.max_newton_iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      std::fill(hess.data().begin(), hess.data().end(), 0.0);
      for (std::size_t j = 0; j < d; ++j) {
        grad[j] = theta[j];
        hess(j, j) = 1.0;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double m = margin(theta, i);
        if (m >= 1.0) continue;
        const double t = y[i] == 1 ? 1.0 : -1.0;
        const auto zi = z.row(i);
        double slope = -1.0;
        if (m > 1.0 - mu) {
          slope = -(1.0 - m) / mu;
          const double curvature = c / mu;
          for (std::size_t r = 0; r < p; ++r) {
            const double xr = r < d ? zi[r] : 1.0;
            for (std::size_t s = 0; s < p; ++s) hess(r, s) += curvature * xr * (s < d ? zi[s] : 1.0);
          }
        }
        for (std::size_t j = 0; j < d; ++j) grad[j] += c * slope * t * zi[j];
        grad[d] += c * slope * t;
      }
      // the bias is unregularized; keep its pivot nonzero when no sample is in the quadratic zone
      hess(d, d) += 1e-12 * (1.0 + c * static_cast<double>(n));

      Vector step = detail::solve_dense(hess, scaled(grad, -1.0));
      const double decrease = dot(grad, step);
      const double f0 = smoothed_objective(theta, mu);
      if (!(decrease < 0.0) || -decrease <= 1e-15 * (1.0 + std::abs(f0))) break;

      double s = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
        Vector trial = theta;
        for (std::size_t j = 0; j < p; ++j) trial[j] += s * step[j];
        if (smoothed_objective(trial, mu) <= f0 + 1e-4 * s * decrease) {
          theta = std::move(trial);
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
  }

  SvmSolution out;
  out.w.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d));
  out.b = theta[d];
  out.objective = svm_objective(z, y, c, out.w, out.b);
  return out;
}

struct FittedModel {
  DiscriminantBasis basis;
  ProjectionMode mode = ProjectionMode::PrimaryOnly;
  Scaler scaler;
  Vector w;
  double b = 0.0;
  double C = 1.0;
  double train_objective = 0.0;
};

struct ScoreSet {
  Vector scores;
  std::vector<int> y;
  std::vector<int> a;
  std::vector<std::string> ids;
};

/// Scaler + SVM on already-computed classifier coordinates.
struct TrainedClassifier {
  Scaler scaler;
  SvmSolution svm;
};

inline TrainedClassifier train_classifier(const Matrix& coords, std::span<const int> y, double c,
                                          const SvmOptions& options = {}) {
  TrainedClassifier out;
  out.scaler = fit_scaler(coords);
  out.svm = train_svm(standardize(coords, out.scaler), y, c, options);
  return out;
}

inline Vector decision_values(const Matrix& coords, const Scaler& scaler, std::span<const double> w, double b) {
  const Matrix zs = standardize(coords, scaler);
  if (zs.cols() != w.size()) throw Error(Errc::DimensionMismatch, "weight length does not match coordinates");
  Vector s(zs.rows());
  for (std::size_t i = 0; i < zs.rows(); ++i) s[i] = dot(w, zs.row(i)) + b;
  return s;
}

inline ScoreSet decision_scores(const FittedModel& model, const FeatureDataset& data) {
  const Matrix coords = mode_coordinates(model.mode, model.basis, data.X);
  return {decision_values(coords, model.scaler, model.w, model.b), data.y, data.a, data.ids};
}

}  // namespace orthofair
