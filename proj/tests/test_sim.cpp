#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "poslin/sim.hpp"
#include "poslin/solvers.hpp"
#include "poslin/spectral.hpp"
#include "test_util.hpp"

using namespace poslin;
using testutil::error_code;
using testutil::fixture;

namespace {

const Problem kEx2 = fixture("example2.json");
const Problem kEx4 = fixture("example4.json");

void check_invariants(const Problem& prob, const Matrix& L, const Trajectory& tr) {
  const auto& A = std::visit([](const auto& q) -> const Matrix& { return q.A; }, prob);
  const auto& B = std::visit([](const auto& q) -> const Matrix& { return q.B; }, prob);
  ASSERT_EQ(tr.states.size(), tr.horizon() + 1);
  for (std::size_t k = 0; k < tr.horizon(); ++k) {
    const Vector& x = tr.states[k];
    const Vector& u = tr.controls[k];
    const Vector next = add(multiply(A, x), multiply(B, u));
    EXPECT_LE(max_abs_diff(next, tr.states[k + 1]), 1e-12 * std::max(1.0, max_abs(next)));
    for (double v : x) EXPECT_GE(v, -1e-12);
    EXPECT_GE(tr.stage_costs[k], -1e-12 * std::max(1.0, max_abs(x)));
    EXPECT_EQ(u, multiply(L, x));
    if (const auto* a = std::get_if<AbsProblem>(&prob)) {
      const Vector bound = multiply(a->E, x);
      for (std::size_t i = 0; i < u.size(); ++i) EXPECT_LE(std::fabs(u[i]), bound[i] + 1e-12);
    } else {
      const auto& q = std::get<NormProblem>(prob);
      EXPECT_LE(norm(u, q.norm), dot(q.N, x) + 1e-12);
    }
  }
}

}  // namespace

TEST(Rollout, ScalarExamples) {
  const auto a = rollout(kEx2, Matrix{{-1}}, Vector{1}, 200);
  EXPECT_EQ(a.horizon(), 200u);
  EXPECT_NEAR(a.total, 5.0, 1e-12);
  EXPECT_DOUBLE_EQ(a.stage_costs[0], 2.5);
  EXPECT_DOUBLE_EQ(a.stage_costs[1], 1.25);

  const auto b = rollout(kEx4, Matrix{{0.05}}, Vector{2}, 500);
  EXPECT_NEAR(b.total, 20.0, 1e-9);

  const auto c = rollout(kEx2, Matrix{{-1}}, Vector{1}, 0);
  EXPECT_TRUE(c.stage_costs.empty());
  EXPECT_EQ(c.total, 0.0);
  EXPECT_EQ(c.states.size(), 1u);
}

TEST(Rollout, Errors) {
  EXPECT_EQ(error_code([] { rollout(kEx2, Matrix{{2}}, Vector{1}, 3); }), ErrorCode::Infeasible);
  EXPECT_EQ(error_code([] { rollout(kEx2, Matrix{{-1}}, Vector{-1}, 3); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code([] { rollout(kEx2, Matrix{{-1}}, Vector{1, 1}, 3); }), ErrorCode::DimensionMismatch);
}

TEST(WriteCsv, HeaderAndRows) {
  std::ostringstream os;
  write_csv(os, rollout(kEx2, Matrix{{-1}}, Vector{1}, 2));
  EXPECT_EQ(os.str(), "k,x1,u1,stage_cost\n0,1,-1,2.5\n1,0.5,-0.5,1.25\n");
  std::ostringstream empty;
  write_csv(empty, rollout(kEx2, Matrix{{-1}}, Vector{1}, 0));
  EXPECT_EQ(empty.str(), "k,x1,u1,stage_cost\n");
}

TEST(Audit, ScalarExample) {
  const auto rep = audit_cost(kEx2, Matrix{{-1}}, Vector{1}, Vector{5}, std::nullopt, 1e-9);
  EXPECT_TRUE(rep.passed);
  EXPECT_TRUE(rep.lower_bound_holds);
  EXPECT_EQ(rep.horizon, 20u);  // 10 * ceil(1 / (1 - 0.5))
  const auto zero = audit_cost(kEx2, Matrix{{-1}}, Vector{0}, Vector{5}, 7, 1e-9);
  EXPECT_EQ(zero.rollout_total, 0.0);
  EXPECT_EQ(zero.predicted, 0.0);
  EXPECT_TRUE(zero.passed);
  EXPECT_EQ(error_code([] { audit_cost(kEx2, Matrix{{1}}, Vector{1}, Vector{5}, std::nullopt, 1e-9); }),
            ErrorCode::Unstable);
}

TEST(Properties, TrajectoryInvariants) {
  gen::Rng rng(71);
  for (int t = 0; t < 60; ++t) {
    const auto inst = t % 2 ? gen::stabilizable_abs(rng, 4, 3) : gen::stabilizable_norm(rng, 4, 3);
    // a random feasible gain: scaled optimal gain
    const Matrix L = gen::uniform(rng, -1.0, 1.0) * inst.optimum.L;
    Vector x0(state_dim(inst.problem));
    for (auto& x : x0) x = gen::uniform(rng, 0.0, 3.0);
    check_invariants(inst.problem, L, rollout(inst.problem, L, x0, 40));
  }
}

TEST(Properties, OptimalAuditAtAnyHorizon) {
  gen::Rng rng(72);
  for (int t = 0; t < 40; ++t) {
    const auto inst = t % 2 ? gen::stabilizable_abs(rng, 4, 3) : gen::stabilizable_norm(rng, 4, 3);
    const auto pi = policy_iteration(inst.problem);
    ASSERT_EQ(pi.status, SolveStatus::Converged);
    Vector x0(state_dim(inst.problem));
    for (auto& x : x0) x = gen::uniform(rng, 0.1, 3.0);
    for (std::size_t H : {1u, 5u, 37u, 400u}) {
      const auto rep = audit_cost(inst.problem, pi.policy->L, x0, *pi.p_star, H, 1e-9);
      EXPECT_TRUE(rep.passed) << "discrepancy " << rep.discrepancy;
    }
  }
}

TEST(Properties, SuboptimalPoliciesCostAtLeastTheOptimum) {
  gen::Rng rng(73);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    const auto inst = gen::stabilizable_abs(rng, 3, 2);
    for (double scale : {0.0, 0.5, -0.5}) {
      const Matrix L = scale * inst.optimum.L;
      const auto& q = std::get<AbsProblem>(inst.problem);
      if (spectral_radius(closed_loop(q.A, q.B, L)).rho > 0.99) continue;
      Vector x0(state_dim(inst.problem));
      for (auto& x : x0) x = gen::uniform(rng, 0.0, 3.0);
      const Trajectory tr = rollout(inst.problem, L, x0, 5000);
      EXPECT_GE(tr.total, dot(x0, inst.optimum.p_star) - 1e-9 * std::max(1.0, tr.total));
      const auto rep = audit_cost(inst.problem, L, x0, inst.optimum.p_star, std::nullopt, 1e-9);
      EXPECT_TRUE(rep.lower_bound_holds);
      ++checked;
    }
  }
  EXPECT_GT(checked, 30);
}
