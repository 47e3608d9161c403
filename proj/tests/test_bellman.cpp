#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "poslin/bellman.hpp"
#include "test_util.hpp"

using namespace poslin;
using testutil::error_code;
using testutil::fixture;

namespace {

AbsProblem ex2() { return std::get<AbsProblem>(fixture("example2.json")); }
NormProblem ex4() { return std::get<NormProblem>(fixture("example4.json")); }
NormProblem ex3() { return std::get<NormProblem>(fixture("example3.json")); }

Vector random_vector(gen::Rng& rng, std::size_t n, double lo, double hi) {
  Vector v(n);
  for (auto& x : v) x = gen::uniform(rng, lo, hi);
  return v;
}

}  // namespace

TEST(ApplyG, ScalarExample) {
  EXPECT_DOUBLE_EQ(apply_G(Vector{0}, ex2())[0], 0.5);
  EXPECT_DOUBLE_EQ(apply_G(Vector{5}, ex2())[0], 5.0);
  // both linear pieces: 0.5 + 1.5p below p = 2, 2.5 + 0.5p above
  EXPECT_DOUBLE_EQ(apply_G(Vector{-1}, ex2())[0], -1.0);
  EXPECT_DOUBLE_EQ(apply_G(Vector{1}, ex2())[0], 2.0);
  EXPECT_DOUBLE_EQ(apply_G(Vector{10}, ex2())[0], 7.5);
}

TEST(ApplyG, EveryNonnegativeVectorIsFixedInTheDegenerateExample) {
  const AbsProblem p = std::get<AbsProblem>(fixture("example1.json"));
  gen::Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Vector v = random_vector(rng, 2, 0.0, 50.0);
    EXPECT_LE(max_abs_diff(apply_G(v, p), v), 1e-12 * 50);
  }
}

TEST(ApplyGL, Examples) {
  EXPECT_DOUBLE_EQ(apply_G_L(Vector{5}, Matrix{{-1}}, ex2())[0], 5.0);
  EXPECT_EQ(apply_G_L(Vector{0}, Matrix{{0}}, ex2()), ex2().s);
  EXPECT_EQ(error_code([] { apply_G_L(Vector{0}, Matrix{{2}}, ex2()); }), ErrorCode::Infeasible);
}

TEST(GreedyAbs, SignFormula) {
  EXPECT_EQ(greedy_abs(Vector{5}, ex2()), (Matrix{{-1}}));
  EXPECT_EQ(greedy_abs(Vector{0}, ex2()), (Matrix{{1}}));
  // r + B'p = 0 at p = 2: sign(0) = +1
  EXPECT_EQ(greedy_abs(Vector{2}, ex2()), (Matrix{{-1}}));
  AbsProblem zero = ex2();
  zero.E(0, 0) = 0.0;
  EXPECT_EQ(max_abs(greedy_abs(Vector{0}, zero).data()), 0.0);
  EXPECT_EQ(max_abs(greedy_abs(Vector{7}, zero).data()), 0.0);
}

TEST(ApplyF, Examples) {
  EXPECT_NEAR(apply_F(Vector{10}, ex4())[0], 10.0, 1e-12);
  EXPECT_NEAR(apply_F(Vector{4}, ex3())[0], 4.0, 1e-12);
  EXPECT_NEAR(apply_F(Vector{20}, ex3())[0], 18.0, 1e-12);
}

TEST(ApplyFL, EveryFeasibleGainFixesTenInTheScalarExample) {
  for (double w : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const double expected = 1 + 0.05 * (-10) * (-w) + (0.9 - w * 0.05) * 10;  // s + L'r + (A + BL)p
    EXPECT_NEAR(expected, 10.0, 1e-12);
    EXPECT_NEAR(apply_F_L(Vector{10}, Matrix{{-w * 0.05}}, ex4())[0], 10.0, 1e-12);
  }
  EXPECT_EQ(apply_F_L(Vector{0}, Matrix{{0}}, ex4()), ex4().s);
  EXPECT_EQ(error_code([] { apply_F_L(Vector{0}, Matrix{{0.1}}, ex4()); }), ErrorCode::Infeasible);
}

TEST(Subgradient, Examples) {
  EXPECT_EQ(subgradient(Vector{-10}, NormKind::Two).w, Vector{-1});
  const auto w = subgradient(Vector{3, -4}, NormKind::Two).w;
  EXPECT_NEAR(w[0], 0.6, 1e-15);
  EXPECT_NEAR(w[1], -0.8, 1e-15);
  EXPECT_EQ(subgradient(Vector{2, -2}, NormKind::One).w, (Vector{1, 0}));
  EXPECT_EQ(subgradient(Vector{1, 0, -3}, NormKind::Inf).w, (Vector{1, 1, -1}));
  const auto zero = subgradient(Vector{0, 0}, NormKind::Two);
  EXPECT_EQ(zero.w, (Vector{0, 0}));
  EXPECT_FALSE(zero.on_boundary);
}

TEST(GreedyNorm, Examples) {
  EXPECT_NEAR(greedy_norm(Vector{0}, ex4())(0, 0), 0.05, 1e-15);
  // r + B'p = 0 at p = 10
  EXPECT_EQ(greedy_norm(Vector{10}, ex4())(0, 0), 0.0);
  NormProblem zero = ex4();
  zero.N[0] = 0.0;
  EXPECT_EQ(greedy_norm(Vector{3}, zero)(0, 0), 0.0);
}

TEST(OptimalPolicySet, ScalarExample) {
  const auto set = optimal_policy_set_abs(Vector{5}, ex2());
  EXPECT_EQ(set.L_bar, (Matrix{{-1}}));
  EXPECT_TRUE(set.free_rows.empty());
  EXPECT_TRUE(set.contains(set.L_bar, ex2()));
  EXPECT_FALSE(set.contains(Matrix{{1}}, ex2()));
}

TEST(OptimalPolicySet, ZeroArgumentFreesTheRow) {
  // r + B'p = -1 + 0.5 * 2 = 0 at p = 2
  const auto set = optimal_policy_set_abs(Vector{2}, ex2());
  ASSERT_EQ(set.free_rows.size(), 1u);
  EXPECT_TRUE(set.is_free(0));
  EXPECT_TRUE(set.contains(Matrix{{0.3}}, ex2()));
  EXPECT_TRUE(set.contains(Matrix{{1}}, ex2()));
  EXPECT_FALSE(set.contains(Matrix{{1.2}}, ex2()));
}

TEST(Properties, Monotone) {
  gen::Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const bool abs_case = t % 2 == 0;
    const Problem prob = abs_case ? Problem{gen::random_abs(rng, 4, 4)}
                                  : Problem{gen::random_norm(rng, 4, 4, static_cast<NormKind>(t % 3))};
    const std::size_t n = state_dim(prob);
    const Vector p = random_vector(rng, n, 0.0, 10.0);
    Vector q = p;
    for (auto& x : q) x += gen::uniform(rng, 0.0, 3.0);
    const Vector tp = apply_bellman(p, prob), tq = apply_bellman(q, prob);
    const Matrix L = greedy(random_vector(rng, n, 0.0, 10.0), prob);
    const Vector lp = apply_policy_bellman(p, L, prob), lq = apply_policy_bellman(q, L, prob);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_LE(tp[i], tq[i] + 1e-12);
      EXPECT_LE(lp[i], lq[i] + 1e-12);
    }
  }
}

TEST(Properties, GreedyAttainsTheMinimum) {
  gen::Rng rng(32);
  for (int t = 0; t < 300; ++t) {
    const Problem prob = t % 2 == 0 ? Problem{gen::random_abs(rng, 5, 4)}
                                    : Problem{gen::random_norm(rng, 5, 4, static_cast<NormKind>(t % 3))};
    const Vector p = random_vector(rng, state_dim(prob), 0.0, 10.0);
    const Matrix L = greedy(p, prob);
    EXPECT_TRUE(is_feasible_gain(L, prob, 1e-12));
    EXPECT_LE(max_abs_diff(apply_policy_bellman(p, L, prob), apply_bellman(p, prob)), 1e-12);
  }
}

TEST(Properties, VertexEnumerationGivesG) {
  gen::Rng rng(33);
  for (int t = 0; t < 100; ++t) {
    const AbsProblem prob = gen::random_abs(rng, 4, 12);
    const Vector p = random_vector(rng, prob.n(), -3.0, 10.0);
    EXPECT_LE(max_abs_diff(apply_G(p, prob), oracle::bellman_by_vertices(prob, p)), 1e-12);
  }
}

TEST(Properties, NormOperatorMatchesExtremeGainsAndSampling) {
  gen::Rng rng(34);
  for (int t = 0; t < 100; ++t) {
    const NormProblem prob = gen::random_norm(rng, 4, 4);
    const Vector p = random_vector(rng, prob.n(), 0.0, 10.0);
    Vector best;
    for (const auto& L : oracle::extreme_gains(prob)) {
      const Vector v = oracle::policy_map(Problem{prob}, L, p);
      if (best.empty()) best = v;
      else
        for (std::size_t i = 0; i < v.size(); ++i) best[i] = std::min(best[i], v[i]);
    }
    EXPECT_LE(max_abs_diff(apply_F(p, prob), best), 1e-12);
  }
}

TEST(Properties, SubgradientContract) {
  gen::Rng rng(35);
  for (int t = 0; t < 300; ++t) {
    const NormKind k = static_cast<NormKind>(t % 3);
    Vector v = random_vector(rng, 1 + t % 5, -4.0, 4.0);
    if (t % 17 == 0) v.assign(v.size(), 0.0);
    const auto choice = subgradient(v, k);
    const bool zero = max_abs(v) == 0.0;
    if (zero) {
      EXPECT_EQ(max_abs(choice.w), 0.0);
      continue;
    }
    EXPECT_NEAR(norm(choice.w, k), 1.0, 1e-12);
    EXPECT_NEAR(dot(choice.w, v), dual_norm(v, k), 1e-12);
  }
}

TEST(Properties, Lipschitz) {
  gen::Rng rng(36);
  for (int t = 0; t < 100; ++t) {
    const AbsProblem prob = gen::random_abs(rng, 4, 3);
    const Vector p = random_vector(rng, prob.n(), 0.0, 10.0);
    const Vector q = random_vector(rng, prob.n(), 0.0, 10.0);
    // ||G(p) - G(q)||_inf <= (||A'||_inf + ||E'||_inf ||B'||_inf) ||p - q||_inf
    auto row_sum_norm = [](const Matrix& m) {
      double best = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (double x : m.row(i)) s += std::fabs(x);
        best = std::max(best, s);
      }
      return best;
    };
    const double C = row_sum_norm(prob.A.transposed()) +
                     row_sum_norm(prob.E.transposed()) * row_sum_norm(prob.B.transposed());
    EXPECT_LE(max_abs_diff(apply_G(p, prob), apply_G(q, prob)), C * max_abs_diff(p, q) + 1e-12);
  }
}
