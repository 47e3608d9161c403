#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "poslin/validate.hpp"
#include "test_util.hpp"

using namespace poslin;
using testutil::fixture;

namespace {

const Check& get(const ValidationReport& rep, const char* name) {
  const Check* c = rep.find(name);
  EXPECT_NE(c, nullptr) << name;
  return *c;
}

}  // namespace

TEST(CheckAbs, ScalarExamplePasses) {
  const auto rep = validate(fixture("example2.json"));
  EXPECT_TRUE(rep.passed);
  ASSERT_EQ(rep.observability_vector.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.observability_vector[0], 0.5);
  for (const auto& c : rep.checks) {
    EXPECT_TRUE(c.passed) << c.name;
    EXPECT_FALSE(c.witness.has_value());
  }
}

TEST(CheckAbs, DegenerateCostFailsObservability) {
  const auto rep = validate(fixture("example1.json"));
  EXPECT_FALSE(rep.passed);
  const Check& obs = get(rep, checks::kObservability);
  EXPECT_FALSE(obs.passed);
  ASSERT_TRUE(obs.witness.has_value());
  EXPECT_EQ(obs.witness->value, 0.0);
  EXPECT_TRUE(get(rep, checks::kCostDominance).passed);
  EXPECT_TRUE(get(rep, checks::kDynamicsDominance).passed);
}

TEST(CheckAbs, NegativeGainBoundFails) {
  AbsProblem p = std::get<AbsProblem>(fixture("example2.json"));
  p.E(0, 0) = -1.0;
  const auto rep = check_abs(p);
  EXPECT_FALSE(rep.passed);
  const Check& c = get(rep, checks::kGainNonnegative);
  EXPECT_FALSE(c.passed);
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_EQ(c.witness->index, (std::vector<std::size_t>{0, 0}));
  EXPECT_EQ(c.witness->value, -1.0);
}

TEST(CheckAbs, DominanceWitnesses) {
  // A = [[0.2]] < |B|E = 0.5, s = 0.5 < E'|r| = 1
  const AbsProblem p{Matrix{{0.2}}, Matrix{{0.5}}, Matrix{{1}}, Vector{0.5}, Vector{-1}};
  const auto rep = check_abs(p);
  EXPECT_FALSE(get(rep, checks::kDynamicsDominance).passed);
  EXPECT_NEAR(get(rep, checks::kDynamicsDominance).witness->value, -0.3, 1e-15);
  EXPECT_FALSE(get(rep, checks::kCostDominance).passed);
  EXPECT_NEAR(get(rep, checks::kCostDominance).witness->value, -0.5, 1e-15);
}

TEST(CheckNorm, Examples) {
  const auto good = validate(fixture("example4.json"));
  EXPECT_TRUE(good.passed);
  EXPECT_NEAR(good.observability_vector[0], 0.5, 1e-15);

  const auto bad = validate(fixture("example3.json"));
  EXPECT_FALSE(bad.passed);
  EXPECT_FALSE(get(bad, checks::kObservability).passed);

  NormProblem neg = std::get<NormProblem>(fixture("example4.json"));
  neg.N[0] = -0.05;
  EXPECT_FALSE(get(check_norm(neg), checks::kGainNonnegative).passed);
}

TEST(CheckNorm, UsesRowDualNorms) {
  // beta_1 = ||[1, -1]||_*: 1 for the 1-norm constraint, 2 for the inf-norm one
  NormProblem p{Matrix{{1.5}}, Matrix{{1, -1}}, Vector{1}, Vector{5}, Vector{1, 1}, NormKind::One};
  EXPECT_DOUBLE_EQ(lower_closed_loop(p)(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(lower_stage_cost(p)[0], 4.0);
  EXPECT_TRUE(check_norm(p).passed);
  p.norm = NormKind::Inf;
  EXPECT_DOUBLE_EQ(lower_closed_loop(p)(0, 0), -0.5);
  EXPECT_FALSE(get(check_norm(p), checks::kDynamicsDominance).passed);
}

TEST(ObservabilityHorizon, Examples) {
  EXPECT_EQ(observability_horizon(Vector{0, 1}, Matrix{{1, 0}, {1, 0}}, 2), std::optional<std::size_t>{2});
  EXPECT_EQ(observability_horizon(Vector{1, 1, 1}, Matrix(3, 3, 0.7), 3), std::optional<std::size_t>{1});
  for (std::size_t len : {1u, 2u, 10u, 100u})
    EXPECT_FALSE(observability_horizon(Vector{0, 1}, Matrix::identity(2), len).has_value());
}

TEST(ObservabilityHorizon, RejectsNegativeInput) {
  EXPECT_EQ(testutil::error_code([] { observability_horizon(Vector{-1}, Matrix{{1}}, 1); }),
            ErrorCode::InvalidArgument);
}

TEST(Irreducible, Examples) {
  EXPECT_FALSE(is_irreducible(Matrix{{1, 0}, {1, 0}}));
  EXPECT_TRUE(is_irreducible(Matrix{{0, 1}, {1, 0}}));
  EXPECT_TRUE(is_irreducible(Matrix{{0}}));
}

TEST(Properties, ValidationMatchesHorizonCondition) {
  gen::Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    AbsProblem p = gen::random_abs(rng, 4, 3);
    // Zero out parts of the slack so observability sometimes fails.
    for (auto& x : p.s)
      if (gen::uniform(rng, 0.0, 1.0) < 0.5) x = dot(p.E.column(&x - p.s.data()), abs(p.r));
    const auto rep = check_abs(p);
    const auto len = observability_horizon(lower_stage_cost(p), lower_closed_loop(p), p.n(), kDefaultValidationTol);
    EXPECT_EQ(rep.passed, len.has_value());
    const auto ref = oracle::n_term_sum(lower_stage_cost(p), lower_closed_loop(p));
    EXPECT_EQ(rep.passed, std::all_of(ref.begin(), ref.end(), [](double x) { return x > 1e-12; }));
  }
}

TEST(Properties, IrreducibleImpliesObservable) {
  gen::Rng rng(22);
  int seen = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = gen::pick(rng, 1, 5);
    const Matrix M = gen::random_nonnegative(rng, n, n, 1.0, 0.6);
    if (!is_irreducible(M)) continue;
    Vector v(n, 0.0);
    v[gen::pick(rng, 0, n - 1)] = gen::uniform(rng, 0.1, 1.0);
    EXPECT_TRUE(observability_horizon(v, M, n).has_value());
    ++seen;
  }
  EXPECT_GT(seen, 20);
}

TEST(Properties, ReportsAreDeterministic) {
  gen::Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    const Problem p{gen::random_norm(rng, 4, 3)};
    const auto a = validate(p), b = validate(p);
    EXPECT_EQ(a.passed, b.passed);
    EXPECT_EQ(a.observability_vector, b.observability_vector);
    ASSERT_EQ(a.checks.size(), b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) EXPECT_EQ(a.checks[i].passed, b.checks[i].passed);
  }
}
