#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "orthofair/dataset.hpp"
#include "orthofair/error.hpp"
#include "orthofair/rng.hpp"

namespace orthofair {

/// Gaussian model with the label on axis 0 and a confounding attribute on
/// axis 1:  x = mu_y·(2y−1)·e₀ + mu_a·(2a−1)·e₁ + sigma·ε,
/// y ~ Bernoulli(½), P(a=1 | y) = ½ + (2y−1)·rho/2.
struct ConfoundSpec {
  std::size_t n_train = 2000;
  std::size_t n_test = 2000;
  std::size_t dim = 16;
  double mu_y = 1.0;
  double mu_a = 1.5;
  double sigma = 1.0;
  double rho_train = 0.8;
  double rho_test = 0.0;
  std::uint64_t seed = 0;
};

inline void validate(const ConfoundSpec& s) {
  if (s.n_train < 8 || s.n_test < 8) throw Error(Errc::InvalidArgument, "split sizes must be at least 8");
  if (s.dim < 2) throw Error(Errc::InvalidArgument, "feature dimension must be at least 2");
  if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) throw Error(Errc::InvalidArgument, "sigma must be positive");
  if (!std::isfinite(s.mu_y) || !std::isfinite(s.mu_a))
    throw Error(Errc::InvalidArgument, "signal magnitudes must be finite");
  for (double rho : {s.rho_train, s.rho_test})
    if (!(rho >= -1.0 && rho <= 1.0)) throw Error(Errc::InvalidArgument, "rho must lie in [-1, 1]");
}

namespace detail {
inline FeatureDataset generate_split(const ConfoundSpec& spec, std::size_t n, double rho, std::uint64_t seed,
                                     const std::string& prefix) {
  Rng rng(seed);
  FeatureDataset d;
  d.X = Matrix(n, spec.dim);
  d.ids.reserve(n);
  d.y.reserve(n);
  d.a.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = rng.uniform() < 0.5 ? 1 : 0;
    const double p_attr = y == 1 ? 0.5 + 0.5 * rho : 0.5 - 0.5 * rho;
    const int a = rng.uniform() < p_attr ? 1 : 0;
    auto row = d.X.row(i);
    for (std::size_t k = 0; k < spec.dim; ++k) row[k] = spec.sigma * rng.normal();
    row[0] += spec.mu_y * (2 * y - 1);
    row[1] += spec.mu_a * (2 * a - 1);
    d.ids.push_back(prefix + std::to_string(i));
    d.y.push_back(y);
    d.a.push_back(a);
  }
  return d;
}
}  // namespace detail

/// Train and test splits from independent streams derived from spec.seed.
inline std::pair<FeatureDataset, FeatureDataset> generate(const ConfoundSpec& spec) {
  validate(spec);
  return {detail::generate_split(spec, spec.n_train, spec.rho_train, derive_seed(spec.seed, 1), "train-"),
          detail::generate_split(spec, spec.n_test, spec.rho_test, derive_seed(spec.seed, 2), "test-")};
}

}  // namespace orthofair
