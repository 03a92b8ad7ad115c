#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace orthofair;
using orthofair::testing::random_dataset;
using orthofair::testing::t1;

namespace {

void expect_matrix(const SymMatrix& m, std::initializer_list<std::initializer_list<double>> want, double tol = 1e-14) {
  std::size_t i = 0;
  for (const auto& row : want) {
    std::size_t j = 0;
    for (double v : row) EXPECT_NEAR(m(i, j++), v, tol) << "(" << i << "," << j - 1 << ")";
    ++i;
  }
}

}  // namespace

TEST(Scatter, T1Primary) {
  const ScatterSet s = compute_scatters(t1(), Labeling::Primary);
  EXPECT_EQ(s.class_means[0], (Vector{1, 0.5}));
  EXPECT_EQ(s.class_means[1], (Vector{2, 2.5}));
  EXPECT_EQ(s.mean_diff, (Vector{-1, -2}));
  expect_matrix(s.within, {{4, 0}, {0, 1}});
  expect_matrix(s.between, {{1, 2}, {2, 4}});
  EXPECT_EQ(s.counts[0], 2u);
  EXPECT_EQ(s.counts[1], 2u);
}

TEST(Scatter, T1Protected) {
  const ScatterSet s = compute_scatters(t1(), Labeling::Protected);
  EXPECT_EQ(s.mean_diff, (Vector{-2, 0}));
  expect_matrix(s.between, {{4, 0}, {0, 0}});
  expect_matrix(s.within, {{1, 2}, {2, 5}});
}

TEST(Scatter, EqualMeansGiveZeroBetween) {
  FeatureDataset d;
  d.ids = {"a", "b", "c", "d"};
  d.X = Matrix{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  d.y = {0, 0, 1, 1};
  d.a = {0, 1, 0, 1};
  const ScatterSet s = compute_scatters(d, Labeling::Primary);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(s.between(i, j), 0.0);
}

TEST(Scatter, DegenerateClass) {
  FeatureDataset d = t1();
  d.y = {0, 1, 1, 1};
  try {
    compute_scatters(d, Labeling::Primary);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateClass);
  }
}

TEST(Scatter, GrandMeanIsWeightedClassMean) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const FeatureDataset d = random_dataset(gen, 30 + trial, 5);
    for (Labeling l : {Labeling::Primary, Labeling::Protected}) {
      const ScatterSet s = compute_scatters(d, l);
      const double n0 = static_cast<double>(s.counts[0]), n1 = static_cast<double>(s.counts[1]);
      for (std::size_t k = 0; k < 5; ++k)
        EXPECT_NEAR(s.grand_mean[k], (n0 * s.class_means[0][k] + n1 * s.class_means[1][k]) / (n0 + n1), 1e-12);
    }
  }
}

TEST(Scatter, WithinIsPsdAndBetweenIsRankOne) {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 50; ++trial) {
    const FeatureDataset d = random_dataset(gen, 40, 6);
    const ScatterSet s = compute_scatters(d, Labeling::Primary);
    const auto within = sym_eigen(s.within);
    EXPECT_GE(within.back().value, -1e-10 * s.within.trace());
    const auto between = sym_eigen(s.between);
    EXPECT_NEAR(between[0].value, dot(s.mean_diff, s.mean_diff), 1e-10 * between[0].value);
    for (std::size_t k = 1; k < between.size(); ++k) EXPECT_LE(std::abs(between[k].value), 1e-10 * between[0].value);
  }
}

TEST(Scatter, RankOneFormIsProportionalToSumForm) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + 2 * static_cast<std::size_t>(trial);
    FeatureDataset d = random_dataset(gen, n, 4);
    const ScatterSet s = compute_scatters(d, Labeling::Primary);
    // Σ_j (ȳ_j − ȳ)(ȳ_j − ȳ)ᵀ, unweighted over the two classes
    Matrix sum_form(4, 4);
    for (const auto& mean : s.class_means) {
      const Vector dev = subtract(mean, s.grand_mean);
      const Matrix o = outer(dev, dev);
      for (std::size_t i = 0; i < 16; ++i) sum_form.data()[i] += o.data()[i];
    }
    const double ratio = s.between(0, 0) / sum_form(0, 0);
    EXPECT_GT(ratio, 0.0);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        EXPECT_NEAR(s.between(i, j), ratio * sum_form(i, j), 1e-9 * frobenius_norm(s.between.matrix()));
    if (s.counts[0] == s.counts[1]) EXPECT_NEAR(ratio, 2.0, 1e-9);
  }
}

TEST(Scatter, TranslationInvariance) {
  std::mt19937_64 gen(24);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureDataset d = random_dataset(gen, 50, 3);
    const ScatterSet s = compute_scatters(d, Labeling::Primary);
    const Vector shift = orthofair::testing::random_vector(gen, 3);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t k = 0; k < 3; ++k) d.X(i, k) += 100.0 * shift[k];
    const ScatterSet t = compute_scatters(d, Labeling::Primary);
    const double scale = frobenius_norm(s.within.matrix());
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(t.within(i, j), s.within(i, j), 1e-9 * scale);
        EXPECT_NEAR(t.between(i, j), s.between(i, j), 1e-9 * scale);
      }
  }
}

TEST(Shrink, Examples) {
  ScatterSet s = compute_scatters(t1(), Labeling::Primary);
  const ScatterSet same = shrink_within(s, 0.0);
  EXPECT_EQ(same.within.matrix().data(), s.within.matrix().data());

  s.within = SymMatrix{{4, 0}, {0, 0}};
  expect_matrix(shrink_within(s, 0.5).within, {{5, 0}, {0, 1}});

  s.within = SymMatrix::identity(2);
  expect_matrix(shrink_within(s, 1.0).within, {{2, 0}, {0, 2}});
}

TEST(Shrink, ZeroTraceWithPositiveGamma) {
  ScatterSet s = compute_scatters(t1(), Labeling::Primary);
  s.within = SymMatrix(2);
  try {
    shrink_within(s, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZeroWithinScatter);
  }
  EXPECT_NO_THROW(shrink_within(s, 0.0));
}

TEST(Shrink, PositiveGammaMakesSingularScatterDefinite) {
  std::mt19937_64 gen(25);
  // M > N: raw within-scatter is singular
  const FeatureDataset d = random_dataset(gen, 12, 20);
  const ScatterSet s = compute_scatters(d, Labeling::Primary);
  EXPECT_THROW(cholesky_spd(s.within), Error);
  EXPECT_NO_THROW(cholesky_spd(shrink_within(s, 1e-3).within));
}
