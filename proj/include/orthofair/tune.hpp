#pragma once

// Bayesian optimization of log10(C) against cross-validated AUC, with a
// squared-exponential Gaussian-process surrogate and expected improvement
// maximized over a fixed grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orthofair/classify.hpp"
#include "orthofair/dataset.hpp"
#include "orthofair/error.hpp"
#include "orthofair/evaluate.hpp"
#include "orthofair/numkernel.hpp"
#include "orthofair/pipeline.hpp"
#include "orthofair/rng.hpp"

namespace orthofair {

struct Observation {
  double x = 0.0;
  double f = 0.0;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct TunerState {
  std::vector<Observation> observations;
  double lo = -3.0;
  double hi = 3.0;
  double kernel_lengthscale = 1.2;
  double kernel_variance = 1.0;
  /// Diagonal jitter, relative to kernel_variance.
  double jitter = 1e-10;
  std::uint64_t seed = 0;

  /// Lengthscale 0.2·(hi − lo); variance is the sample variance of the
  /// observed values, floored at 1e-8.
  static TunerState with_defaults(std::vector<Observation> obs, double lo, double hi, std::uint64_t seed) {
    TunerState s;
    s.observations = std::move(obs);
    s.lo = lo;
    s.hi = hi;
    s.seed = seed;
    s.kernel_lengthscale = 0.2 * (hi - lo);
    double var = 0.0;
    const std::size_t n = s.observations.size();
    if (n >= 2) {
      double m = 0.0;
      for (const auto& o : s.observations) m += o.f;
      m /= static_cast<double>(n);
      for (const auto& o : s.observations) var += (o.f - m) * (o.f - m);
      var /= static_cast<double>(n - 1);
    }
    s.kernel_variance = std::max(var, 1e-8);
    return s;
  }
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// GP regression conditioned on a tuner state; the prior mean is the mean of
/// the observed values.
class GaussianProcess {
 public:
  explicit GaussianProcess(const TunerState& state) : state_(state) {
    const auto& obs = state.observations;
    const std::size_t n = obs.size();
    if (n == 0) throw Error(Errc::InvalidArgument, "GP posterior needs at least one observation");
    for (const auto& o : obs) prior_mean_ += o.f;
    prior_mean_ /= static_cast<double>(n);

    double jitter = state.jitter;
    for (;;) {
      SymMatrix k(n);
      for (std::size_t i = 0; i < n; ++i) {
        k.set(i, i, state.kernel_variance * (1.0 + jitter));
        for (std::size_t j = i + 1; j < n; ++j) k.set(i, j, kernel(obs[i].x, obs[j].x));
      }
      try {
        chol_ = cholesky_spd(k);
        break;
      } catch (const Error& e) {
        if (e.code() != Errc::NotPositiveDefinite) throw;
        if (jitter >= 1e-4)
          throw Error(Errc::IllConditionedKernel, "kernel matrix is singular even with jitter 1e-4");
        jitter = std::min(jitter * 10.0, 1e-4);
      }
    }
    Vector resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = obs[i].f - prior_mean_;
    weights_ = cholesky_solve(chol_, resid);
  }

  double kernel(double x, double xp) const {
    const double d = x - xp;
    const double l = state_.kernel_lengthscale;
    return state_.kernel_variance * std::exp(-d * d / (2.0 * l * l));
  }

  Posterior predict(double x) const {
    const auto& obs = state_.observations;
    const std::size_t n = obs.size();
    Vector k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = kernel(x, obs[i].x);
    Posterior p;
    p.mean = prior_mean_ + dot(k, weights_);
    detail::forward_substitute(chol_, k);
    p.variance = std::max(0.0, state_.kernel_variance - dot(k, k));
    return p;
  }

  double best_observed() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& o : state_.observations) best = std::max(best, o.f);
    return best;
  }

 private:
  TunerState state_;
  double prior_mean_ = 0.0;
  Matrix chol_;
  Vector weights_;
};

inline Posterior gp_posterior(const TunerState& state, double x) { return GaussianProcess(state).predict(x); }

/// E[max(0, f − f_best)] for f ~ N(mean, variance).
inline double expected_improvement(double mean, double variance, double best) {
  const double s = std::sqrt(std::max(variance, 0.0));
  const double gain = mean - best;
  if (s <= 1e-300) return std::max(0.0, gain);
  const double z = gain / s;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return std::max(0.0, gain * cdf + s * pdf);
}

inline double expected_improvement(const GaussianProcess& gp, double x) {
  const Posterior p = gp.predict(x);
  return expected_improvement(p.mean, p.variance, gp.best_observed());
}

inline double expected_improvement(const TunerState& state, double x) {
  return expected_improvement(GaussianProcess(state), x);
}

struct TuneOptions {
  double lo = -3.0;
  double hi = 3.0;
  std::size_t budget = 20;
  std::uint64_t seed = 0;
  std::size_t initial_points = 5;
  std::size_t grid_points = 256;
};

struct TuneResult {
  double best_x = 0.0;
  double best_f = 0.0;
  std::vector<Observation> trace;
};

/// Base-2 radical inverse.
inline double van_der_corput(std::uint64_t i) {
  double v = 0.0, denom = 1.0;
  while (i > 0) {
    denom *= 2.0;
    v += static_cast<double>(i & 1U) / denom;
    i >>= 1U;
  }
  return v;
}

/// Maximizes `objective` over [lo, hi]: initial points from a randomly shifted
/// van der Corput sequence, then one evaluation per step at the grid point of
/// largest expected improvement (first index on ties).
template <class Objective>
TuneResult bayes_optimize(Objective&& objective, const TuneOptions& options) {
  if (options.budget < options.initial_points + 1)
    throw Error(Errc::InvalidArgument, "budget must be at least " + std::to_string(options.initial_points + 1));
  if (!(options.hi > options.lo)) throw Error(Errc::InvalidArgument, "empty search interval");

  TuneResult result;
  const double width = options.hi - options.lo;
  Rng rng(derive_seed(options.seed, 0x7475'6e65ULL));
  const double shift = rng.uniform();
  for (std::size_t i = 0; i < options.initial_points; ++i) {
    double u = van_der_corput(i + 1) + shift;
    u -= std::floor(u);
    const double x = options.lo + width * u;
    result.trace.push_back({x, objective(x)});
  }

  const std::size_t g = std::max<std::size_t>(options.grid_points, 2);
  while (result.trace.size() < options.budget) {
    const GaussianProcess gp(TunerState::with_defaults(result.trace, options.lo, options.hi, options.seed));
    double best_ei = -1.0;
    double next = options.lo;
    for (std::size_t k = 0; k < g; ++k) {
      const double x = options.lo + width * static_cast<double>(k) / static_cast<double>(g - 1);
      const double ei = expected_improvement(gp, x);
      if (ei > best_ei) {
        best_ei = ei;
        next = x;
      }
    }
    result.trace.push_back({next, objective(next)});
  }

  result.best_f = result.trace.front().f;
  result.best_x = result.trace.front().x;
  for (const auto& o : result.trace)
    if (o.f > result.best_f) {
      result.best_f = o.f;
      result.best_x = o.x;
    }
  return result;
}

// ---------------------------------------------------------------------------
// Cross-validated AUC

/// Fold index per sample. Samples are taken cell by cell in (label, attribute)
/// order, ordered within a cell by a seeded hash of their id, and dealt
/// round-robin with one counter, so assignment does not depend on row order.
inline std::vector<std::size_t> assign_folds(const FeatureDataset& data, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> fold(data.size());
  std::size_t counter = 0;
  for (int label = 0; label < 2; ++label)
    for (int attr = 0; attr < 2; ++attr) {
      std::vector<std::pair<std::uint64_t, std::size_t>> cell;
      for (std::size_t i = 0; i < data.size(); ++i)
        if (data.y[i] == label && data.a[i] == attr) cell.push_back({mix64(fnv1a64(data.ids[i]) ^ seed), i});
      std::sort(cell.begin(), cell.end(), [&](const auto& l, const auto& r) {
        return l.first != r.first ? l.first < r.first : data.ids[l.second] < data.ids[r.second];
      });
      for (const auto& [key, i] : cell) fold[i] = counter++ % k;
    }
  return fold;
}

/// Largest k ≤ requested such that every held-out fold contains both labels and
/// every training split keeps ≥ 2 samples in each label and attribute class.
inline std::size_t feasible_folds(const FeatureDataset& data, std::size_t requested) {
  const auto cells = data.contingency();
  for (std::size_t k = requested; k >= 2; --k) {
    auto most_in_fold = [k](std::size_t n) { return (n + k - 1) / k; };
    bool ok = true;
    for (int l = 0; l < 2; ++l) {
      const std::size_t label_n = cells[l][0] + cells[l][1];
      const std::size_t attr_n = cells[0][l] + cells[1][l];
      if (label_n < k) ok = false;
      if (label_n < 2 + most_in_fold(cells[l][0]) + most_in_fold(cells[l][1])) ok = false;
      if (attr_n < 2 + most_in_fold(cells[0][l]) + most_in_fold(cells[1][l])) ok = false;
    }
    if (ok) return k;
  }
  return 0;
}

/// Mean held-out AUC over stratified folds; each fold refits basis, scaler and SVM.
inline double cv_objective(const FeatureDataset& data, ProjectionMode mode, double gamma, double c,
                           std::uint64_t seed, std::size_t requested_folds = 5,
                           const SvmOptions& options = {}) {
  const std::size_t k = feasible_folds(data, requested_folds);
  if (k < 2) throw Error(Errc::DegenerateClass, "too few samples per class for 2-fold cross-validation");
  if (k < requested_folds)
    warn("cross-validation reduced from " + std::to_string(requested_folds) + " to " + std::to_string(k) + " folds");

  const auto fold = assign_folds(data, k, seed);
  double total = 0.0;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < data.size(); ++i) (fold[i] == f ? test_idx : train_idx).push_back(i);
    const FeatureDataset train = data.subset(train_idx);
    const FeatureDataset held = data.subset(test_idx);
    const Vector scores = fit_and_score(train, held, mode, gamma, c, options);
    total += roc_curve(scores, held.y).auc;
  }
  return total / static_cast<double>(k);
}

struct SvmTuning {
  double C = 1.0;
  double objective = 0.0;
  std::vector<Observation> trace;  // x = log10(C)
};

inline SvmTuning tune_svm(const FeatureDataset& data, ProjectionMode mode, double gamma, std::size_t budget,
                          std::uint64_t seed) {
  TuneOptions opts;
  opts.budget = budget;
  opts.seed = seed;
  const TuneResult r = bayes_optimize(
      [&](double log10_c) { return cv_objective(data, mode, gamma, std::pow(10.0, log10_c), seed); }, opts);
  return {std::pow(10.0, r.best_x), r.best_f, r.trace};
}

}  // namespace orthofair
