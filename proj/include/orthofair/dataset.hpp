#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "orthofair/error.hpp"
#include "orthofair/matrix.hpp"

namespace orthofair {

/// N×M feature matrix with a binary primary label and a binary protected
/// attribute per row.
struct FeatureDataset {
  std::vector<std::string> ids;
  Matrix X;
  std::vector<int> y;
  std::vector<int> a;

  std::size_t size() const noexcept { return X.rows(); }
  std::size_t dim() const noexcept { return X.cols(); }

  /// counts[label][attr]
  std::array<std::array<std::size_t, 2>, 2> contingency() const {
    std::array<std::array<std::size_t, 2>, 2> c{};
    for (std::size_t i = 0; i < y.size(); ++i) ++c[y[i]][a[i]];
    return c;
  }

  /// Rows in the given order (indices may repeat).
  FeatureDataset subset(std::span<const std::size_t> indices) const {
    FeatureDataset out;
    out.X = Matrix(indices.size(), dim());
    out.ids.reserve(indices.size());
    out.y.reserve(indices.size());
    out.a.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
      const std::size_t i = indices[r];
      std::copy(X.row(i).begin(), X.row(i).end(), out.X.row(r).begin());
      out.ids.push_back(ids[i]);
      out.y.push_back(y[i]);
      out.a.push_back(a[i]);
    }
    return out;
  }

  friend bool operator==(const FeatureDataset&, const FeatureDataset&) = default;
};

enum class Labeling { Primary, Protected };

inline const char* labeling_name(Labeling l) noexcept {
  return l == Labeling::Primary ? "primary" : "protected";
}

inline const std::vector<int>& labels_of(const FeatureDataset& data, Labeling l) noexcept {
  return l == Labeling::Primary ? data.y : data.a;
}

/// Checks shape consistency, binary labels, finiteness, N ≥ 4 and at least two
/// samples in every label class and every attribute class.
inline void validate(const FeatureDataset& data) {
  const std::size_t n = data.size();
  if (data.ids.size() != n || data.y.size() != n || data.a.size() != n)
    throw Error(Errc::DimensionMismatch, "dataset columns have inconsistent lengths");
  for (std::size_t i = 0; i < n; ++i) {
    if ((data.y[i] != 0 && data.y[i] != 1) || (data.a[i] != 0 && data.a[i] != 1))
      throw Error(Errc::SchemaError, "label and attribute must be 0 or 1", i);
    for (double v : data.X.row(i))
      if (!std::isfinite(v)) throw Error(Errc::SchemaError, "non-finite feature value", i);
  }
  if (n < 4) throw Error(Errc::DegenerateClass, "dataset needs at least 4 samples");
  for (Labeling l : {Labeling::Primary, Labeling::Protected}) {
    std::array<std::size_t, 2> counts{};
    for (int v : labels_of(data, l)) ++counts[v];
    for (int c = 0; c < 2; ++c)
      if (counts[c] < 2)
        throw Error(Errc::DegenerateClass,
                    std::string(labeling_name(l)) + " class " + std::to_string(c) +
                        " has fewer than 2 samples",
                    static_cast<std::size_t>(c));
  }
}

}  // namespace orthofair
