#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "orthofair/dataset.hpp"
#include "orthofair/error.hpp"
#include "orthofair/matrix.hpp"

namespace orthofair {

/// Class means and scatter matrices for one binary labeling. Class 1 of the
/// two-class formulation is labeling value 0, class 2 is value 1.
struct ScatterSet {
  Vector grand_mean;
  std::array<Vector, 2> class_means;
  Vector mean_diff;    // s_b = mean(class 0) − mean(class 1)
  SymMatrix between;   // s_b s_bᵀ
  SymMatrix within;    // Σ_classes Σ_samples (x − mean_c)(x − mean_c)ᵀ
  std::array<std::size_t, 2> counts{};

  std::size_t dim() const noexcept { return grand_mean.size(); }
  std::size_t total() const noexcept { return counts[0] + counts[1]; }
};

inline ScatterSet compute_scatters(const FeatureDataset& data, Labeling labeling) {
  const auto& labels = labels_of(data, labeling);
  const std::size_t n = data.size();
  const std::size_t m = data.dim();
  if (labels.size() != n) throw Error(Errc::DimensionMismatch, "label column length mismatch");

  ScatterSet s;
  s.class_means = {Vector(m, 0.0), Vector(m, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = labels[i];
    ++s.counts[c];
    const auto row = data.X.row(i);
    for (std::size_t k = 0; k < m; ++k) s.class_means[c][k] += row[k];
  }
  for (int c = 0; c < 2; ++c)
    if (s.counts[c] < 2)
      throw Error(Errc::DegenerateClass,
                  std::string(labeling_name(labeling)) + " class " + std::to_string(c) +
                      " has fewer than 2 samples",
                  static_cast<std::size_t>(c));
  for (int c = 0; c < 2; ++c)
    for (double& v : s.class_means[c]) v /= static_cast<double>(s.counts[c]);

  s.grand_mean.resize(m);
  const double n0 = static_cast<double>(s.counts[0]);
  const double n1 = static_cast<double>(s.counts[1]);
  for (std::size_t k = 0; k < m; ++k)
    s.grand_mean[k] = (n0 * s.class_means[0][k] + n1 * s.class_means[1][k]) / (n0 + n1);

  s.mean_diff = subtract(s.class_means[0], s.class_means[1]);
  s.between = SymMatrix(outer(s.mean_diff, s.mean_diff));

  // Second pass over deviations; samples are visited in row order and only the
  // upper triangle is accumulated, so the result is exactly symmetric.
  Matrix w(m, m);
  Vector dev(m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.X.row(i);
    const auto& mean = s.class_means[labels[i]];
    for (std::size_t k = 0; k < m; ++k) dev[k] = row[k] - mean[k];
    for (std::size_t p = 0; p < m; ++p) {
      const double dp = dev[p];
      for (std::size_t q = p; q < m; ++q) w(p, q) += dp * dev[q];
    }
  }
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = p + 1; q < m; ++q) w(q, p) = w(p, q);
  s.within = SymMatrix(std::move(w));
  return s;
}

/// S_W ← S_W + γ·(trace(S_W)/M)·I. γ = 0 returns the input unchanged.
inline ScatterSet shrink_within(ScatterSet s, double gamma) {
  if (!(gamma >= 0.0)) throw Error(Errc::InvalidArgument, "shrinkage must be nonnegative");
  if (gamma == 0.0) return s;
  const double tr = s.within.trace();
  if (tr <= 0.0) throw Error(Errc::ZeroWithinScatter, "within-class scatter has zero trace");
  const double ridge = gamma * tr / static_cast<double>(s.dim());
  Matrix w = s.within.matrix();
  for (std::size_t i = 0; i < s.dim(); ++i) w(i, i) += ridge;
  s.within = SymMatrix(std::move(w));
  return s;
}

}  // namespace orthofair
