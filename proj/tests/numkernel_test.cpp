#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace orthofair;
using orthofair::testing::pencil_roots;
using orthofair::testing::random_orthogonal;
using orthofair::testing::random_spd;
using orthofair::testing::random_unit;
using orthofair::testing::random_vector;

namespace {

double reconstruction_error(const Matrix& l, const SymMatrix& a) {
  return frobenius_norm(subtract(multiply(l, l.transposed()), a.matrix()));
}

void expect_vec_near(std::span<const double> got, std::initializer_list<double> want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  std::size_t i = 0;
  for (double w : want) EXPECT_NEAR(got[i++], w, tol) << "entry " << i - 1;
}

}  // namespace

TEST(SymMatrix, RejectsAsymmetricAndNonFinite) {
  EXPECT_THROW(SymMatrix(Matrix{{1, 2}, {2.0000001, 1}}), Error);
  EXPECT_THROW(SymMatrix(Matrix{{1, NAN}, {NAN, 1}}), Error);
  EXPECT_NO_THROW(SymMatrix(Matrix{{1, 2}, {2, 1}}));
}

TEST(Cholesky, IdentityIsItsOwnFactor) {
  const Matrix l = cholesky_spd(SymMatrix::identity(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(l(i, j), i == j ? 1.0 : 0.0);
}

TEST(Cholesky, DiagonalExample) {
  const Matrix l = cholesky_spd(SymMatrix{{4, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(l(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(l(1, 1), 1.0);
}

TEST(Cholesky, IndefiniteReportsPivot) {
  try {
    cholesky_spd(SymMatrix{{1, 2}, {2, 1}});
    FAIL() << "expected NotPositiveDefinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPositiveDefinite);
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 1u);
  }
}

TEST(Cholesky, ReconstructsRandomSpd) {
  std::mt19937_64 gen(11);
  for (std::size_t n = 1; n <= 16; ++n) {
    const SymMatrix a = random_spd(gen, n);
    const Matrix l = cholesky_spd(a);
    EXPECT_LE(reconstruction_error(l, a), 1e-12 * frobenius_norm(a.matrix())) << "order " << n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) EXPECT_EQ(l(i, j), 0.0);
  }
}

TEST(SolveSpd, Examples) {
  expect_vec_near(solve_spd(SymMatrix::identity(2), Vector{3, 7}), {3, 7}, 1e-15);
  expect_vec_near(solve_spd(SymMatrix{{4, 0}, {0, 1}}, Vector{-1, -2}), {-0.25, -2}, 1e-15);
  expect_vec_near(solve_spd(SymMatrix{{2, 1}, {1, 2}}, Vector{3, 3}), {1, 1}, 1e-14);
}

TEST(SolveSpd, PropagatesNotPositiveDefinite) {
  try {
    solve_spd(SymMatrix{{1, 2}, {2, 1}}, Vector{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPositiveDefinite);
  }
}

TEST(SolveSpd, RoundTripOnRandomSpd) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 16);
    const SymMatrix a = random_spd(gen, n, 0.5);
    const Vector x = random_vector(gen, n);
    const Vector b = multiply(a.matrix(), x);
    const Vector got = solve_spd(a, b);
    EXPECT_LE(norm2(subtract(got, x)), 1e-8 * norm2(x)) << "trial " << trial;
    const Vector r = subtract(multiply(a.matrix(), got), b);
    EXPECT_LE(norm2(r), 1e-10 * (frobenius_norm(a.matrix()) * norm2(got) + norm2(b)));
  }
}

TEST(SymEigen, DiagonalExample) {
  const auto pairs = sym_eigen(SymMatrix{{5, 0}, {0, 2}});
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_DOUBLE_EQ(pairs[0].value, 5.0);
  EXPECT_DOUBLE_EQ(pairs[1].value, 2.0);
  EXPECT_DOUBLE_EQ(std::abs(pairs[0].vector[0]), 1.0);
  EXPECT_DOUBLE_EQ(std::abs(pairs[1].vector[1]), 1.0);
}

TEST(SymEigen, SwapMatrix) {
  const auto pairs = sym_eigen(SymMatrix{{0, 1}, {1, 0}});
  EXPECT_NEAR(pairs[0].value, 1.0, 1e-14);
  EXPECT_NEAR(pairs[1].value, -1.0, 1e-14);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(pairs[0].vector[0]), h, 1e-14);
  EXPECT_NEAR(pairs[0].vector[0] * pairs[0].vector[1], 0.5, 1e-14);
  EXPECT_NEAR(pairs[1].vector[0] * pairs[1].vector[1], -0.5, 1e-14);
}

TEST(SymEigen, IdentityOrderFour) {
  for (const auto& p : sym_eigen(SymMatrix::identity(4))) EXPECT_DOUBLE_EQ(p.value, 1.0);
}

TEST(SymEigen, ResidualsAndOrthonormalityOnRandomMatrices) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 15);
    const Matrix g = orthofair::testing::random_matrix(gen, n, n);
    const SymMatrix a = SymMatrix::symmetrized(g);
    const auto pairs = sym_eigen(a);
    const double fa = frobenius_norm(a.matrix());
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_LE(std::abs(norm2(pairs[k].vector) - 1.0), 1e-12);
      EXPECT_LE(orthofair::testing::residual_norm(a, pairs[k].vector, pairs[k].value), 1e-9 * fa);
      if (k > 0) EXPECT_GE(pairs[k - 1].value, pairs[k].value);
      for (std::size_t j = 0; j < k; ++j) EXPECT_LE(std::abs(dot(pairs[k].vector, pairs[j].vector)), 1e-9);
    }
  }
}

TEST(SymEigen, SpectrumIsRotationInvariant) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 10);
    const SymMatrix a = random_spd(gen, n);
    const Matrix q = random_orthogonal(gen, n);
    const auto base = sym_eigen(a);
    const auto rotated = sym_eigen(SymMatrix::symmetrized(multiply(multiply(q.transposed(), a.matrix()), q)));
    for (std::size_t k = 0; k < n; ++k)
      EXPECT_NEAR(rotated[k].value, base[k].value, 1e-8 * std::max(1.0, std::abs(base[k].value)));
  }
}

TEST(GenSymEigen, Examples) {
  const auto p1 = gen_sym_eigen(SymMatrix{{2, 0}, {0, 1}}, SymMatrix::identity(2));
  EXPECT_NEAR(p1[0].value, 2.0, 1e-14);
  EXPECT_NEAR(p1[1].value, 1.0, 1e-14);

  const auto p2 = gen_sym_eigen(SymMatrix{{4, 0}, {0, 0}}, SymMatrix{{1, 2}, {2, 5}});
  EXPECT_NEAR(p2[0].value, 20.0, 1e-10);
  EXPECT_NEAR(p2[1].value, 0.0, 1e-10);

  std::mt19937_64 gen(15);
  const SymMatrix b = random_spd(gen, 5);
  for (const auto& p : gen_sym_eigen(b, b)) EXPECT_NEAR(p.value, 1.0, 1e-10);
}

TEST(GenSymEigen, ResidualAndBOrthogonality) {
  std::mt19937_64 gen(16);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 8);
    const SymMatrix a = random_spd(gen, n, 0.0);
    const SymMatrix b = random_spd(gen, n);
    const auto pairs = gen_sym_eigen(a, b);
    const double scale = frobenius_norm(a.matrix()) + frobenius_norm(b.matrix());
    for (std::size_t k = 0; k < n; ++k) {
      const Vector av = multiply(a.matrix(), pairs[k].vector);
      const Vector bv = multiply(b.matrix(), pairs[k].vector);
      Vector r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = av[i] - pairs[k].value * bv[i];
      EXPECT_LE(norm2(r), 1e-8 * scale);
      EXPECT_NEAR(norm2(pairs[k].vector), 1.0, 1e-12);
      for (std::size_t j = 0; j < k; ++j)
        EXPECT_LE(std::abs(dot(pairs[j].vector, bv)), 1e-8 * scale);
    }
  }
}

TEST(GenSymEigen, MatchesCharacteristicPolynomialOracle) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 2 : 3;
    const SymMatrix a = random_spd(gen, n);
    const SymMatrix b = random_spd(gen, n);
    const auto pairs = gen_sym_eigen(a, b);
    const auto roots = pencil_roots(a, b);
    for (std::size_t k = 0; k < n; ++k)
      EXPECT_NEAR(pairs[k].value, roots[k], 1e-8 * std::max(1.0, std::abs(roots[k]))) << "trial " << trial;
  }
}

TEST(GenSymEigen, PropagatesNotPositiveDefiniteForB) {
  try {
    gen_sym_eigen(SymMatrix::identity(2), SymMatrix{{1, 2}, {2, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPositiveDefinite);
  }
}

TEST(ComplementBasis, AxisDirection) {
  const Matrix q = complement_basis(Vector{1, 0, 0}, 3);
  ASSERT_EQ(q.rows(), 3u);
  ASSERT_EQ(q.cols(), 2u);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(q(0, j), 0.0);
  EXPECT_NEAR(std::abs(q(1, 0) * q(2, 1) - q(2, 0) * q(1, 1)), 1.0, 1e-15);
}

TEST(ComplementBasis, DiagonalInPlane) {
  const double h = 1.0 / std::sqrt(2.0);
  const Matrix q = complement_basis(Vector{h, h}, 2);
  ASSERT_EQ(q.cols(), 1u);
  EXPECT_NEAR(std::abs(q(0, 0)), h, 1e-15);
  EXPECT_NEAR(q(0, 0), -q(1, 0), 1e-15);
}

TEST(ComplementBasis, OrthonormalAndOrthogonalToDirection) {
  std::mt19937_64 gen(18);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 30);
    const Vector d = random_unit(gen, n);
    const Matrix q = complement_basis(d, n);
    const Matrix qtq = multiply(q.transposed(), q);
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = 0; j + 1 < n; ++j) EXPECT_NEAR(qtq(i, j), i == j ? 1.0 : 0.0, 1e-12);
    EXPECT_LE(norm2(multiply_transposed(q, d)), 1e-12);
    const Matrix again = complement_basis(d, n);
    EXPECT_EQ(again.data(), q.data());
  }
}

TEST(ComplementBasis, RejectsNonUnitDirection) {
  try {
    complement_basis(Vector{1.0, 1.0}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateDirection);
  }
}
