#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>

#include "poslin/model.hpp"

namespace poslin {

struct Trajectory {
  std::vector<Vector> states;    // horizon + 1 entries, states[0] = x0
  std::vector<Vector> controls;  // horizon entries
  Vector stage_costs;            // s'x_k + r'u_k
  std::size_t control_dim = 0;
  double total = 0.0;

  std::size_t horizon() const noexcept { return controls.size(); }
};

/// x_{k+1} = A x_k + B u_k with u_k = L x_k. Throws Infeasible for a gain
/// outside the feasible set and InvalidArgument for x0 with negative entries.
Trajectory rollout(const Problem& prob, const Matrix& L, const Vector& x0, std::size_t horizon);

/// CSV with header k,x1..xn,u1..um,stage_cost and one row per step.
void write_csv(std::ostream& os, const Trajectory& traj);

struct AuditReport {
  bool passed = false;
  std::size_t horizon = 0;
  double rollout_total = 0.0;
  double tail = 0.0;        // p*'x_H
  double predicted = 0.0;   // x0'p*
  double discrepancy = 0.0; // |rollout_total + tail - predicted|
  /// Cost of the policy itself (rollout + x_H'p_L) is never below x0'p*.
  bool lower_bound_holds = false;
  double policy_cost = 0.0;  // x0'p_L
};

/// Reconciles a finite rollout with the infinite-horizon prediction x0'p*.
/// Without an explicit horizon uses 10 * ceil(1 / (1 - rho)), capped at 1e6.
/// Throws Unstable if rho(A + BL) >= 1.
AuditReport audit_cost(const Problem& prob, const Matrix& L, const Vector& x0, const Vector& p_star,
                       std::optional<std::size_t> horizon, double rel_tol);

}  // namespace poslin
