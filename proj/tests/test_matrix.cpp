#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "poslin/matrix.hpp"
#include "test_util.hpp"

using namespace poslin;
using testutil::error_code;

TEST(Matrix, ConstructionAndAccess) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 2), 6.0);
  EXPECT_EQ(m.column(1), (Vector{2, 5}));
  EXPECT_EQ(m.transposed(), (Matrix{{1, 4}, {2, 5}, {3, 6}}));
  EXPECT_EQ(Matrix::identity(2), (Matrix{{1, 0}, {0, 1}}));
  EXPECT_EQ(Matrix::row_vector({1, 2}), (Matrix{{1, 2}}));
  EXPECT_EQ(m.min_entry(), 1.0);
}

TEST(Matrix, Arithmetic) {
  const Matrix a{{1, -2}, {3, 4}};
  const Matrix b{{0, 1}, {1, 0}};
  EXPECT_EQ(a * b, (Matrix{{-2, 1}, {4, 3}}));
  EXPECT_EQ(a + b, (Matrix{{1, -1}, {4, 4}}));
  EXPECT_EQ(a - b, (Matrix{{1, -3}, {2, 4}}));
  EXPECT_EQ(2.0 * a, (Matrix{{2, -4}, {6, 8}}));
  EXPECT_EQ(abs(a), (Matrix{{1, 2}, {3, 4}}));
  EXPECT_EQ(multiply(a, Vector{1, 1}), (Vector{-1, 7}));
  EXPECT_EQ(multiply_transposed(a, Vector{1, 1}), (Vector{4, 2}));
  EXPECT_EQ(dot(Vector{1, 2}, Vector{3, 4}), 11.0);
  EXPECT_EQ(max_abs(Vector{1, -5, 2}), 5.0);
  EXPECT_EQ(max_abs_diff(Vector{1, 2}, Vector{1.5, 0}), 2.0);
}

TEST(Matrix, NonFiniteDetected) {
  Matrix m(1, 2, 0.0);
  EXPECT_TRUE(m.all_finite());
  m(0, 1) = std::nan("");
  EXPECT_FALSE(m.all_finite());
  EXPECT_FALSE(all_finite(Vector{1.0, INFINITY}));
}

TEST(SolveLinear, MatchesEigenOnRandomSystems) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 6;
    Matrix m(n, n);
    Vector b(n);
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = u(rng);
      for (std::size_t j = 0; j < n; ++j) m(i, j) = u(rng) + (i == j ? 2.0 : 0.0);
    }
    const Vector x = solve_linear(m, b);
    const Vector ref = oracle::from_eigen(oracle::to_eigen(m).fullPivLu().solve(oracle::to_eigen(b)));
    EXPECT_LT(max_abs_diff(x, ref), 1e-12);
  }
}

TEST(SolveLinear, NeedsPivoting) {
  const Vector x = solve_linear(Matrix{{0, 1}, {1, 0}}, Vector{2, 3});
  EXPECT_EQ(x, (Vector{3, 2}));
}

TEST(SolveLinear, SingularThrows) {
  EXPECT_EQ(error_code([] { solve_linear(Matrix{{1, 2}, {2, 4}}, Vector{1, 1}); }), ErrorCode::Singular);
}
