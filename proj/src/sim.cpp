#include "poslin/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "poslin/error.hpp"
#include "poslin/solvers.hpp"
#include "poslin/spectral.hpp"

namespace poslin {

namespace {

struct SystemView {
  const Matrix& A;
  const Matrix& B;
  const Vector& s;
  const Vector& r;
};

SystemView view(const Problem& prob) {
  return std::visit([](const auto& q) { return SystemView{q.A, q.B, q.s, q.r}; }, prob);
}

}  // namespace

Trajectory rollout(const Problem& prob, const Matrix& L, const Vector& x0, std::size_t horizon) {
  const auto sys = view(prob);
  const std::size_t n = sys.A.rows();
  if (x0.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "x0 has length " + std::to_string(x0.size()) + ", expected " +
                                                  std::to_string(n));
  }
  if (!all_finite(x0) || std::any_of(x0.begin(), x0.end(), [](double v) { return v < 0.0; })) {
    throw Error(ErrorCode::InvalidArgument, "x0 must be finite and nonnegative");
  }
  if (!is_feasible_gain(L, prob, 1e-12)) throw Error(ErrorCode::Infeasible, "gain is not feasible");

  Trajectory traj;
  traj.states.reserve(horizon + 1);
  traj.controls.reserve(horizon);
  traj.control_dim = L.rows();
  traj.stage_costs.reserve(horizon);
  traj.states.push_back(x0);
  for (std::size_t k = 0; k < horizon; ++k) {
    const Vector& x = traj.states.back();
    Vector u = multiply(L, x);
    const double cost = dot(sys.s, x) + dot(sys.r, u);
    Vector next = add(multiply(sys.A, x), multiply(sys.B, u));
    traj.stage_costs.push_back(cost);
    traj.total += cost;
    traj.controls.push_back(std::move(u));
    traj.states.push_back(std::move(next));
  }
  return traj;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  const std::size_t m = traj.control_dim;
  os << "k";
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i + 1;
  for (std::size_t i = 0; i < m; ++i) os << ",u" << i + 1;
  os << ",stage_cost\n";
  const auto old_prec = os.precision(17);
  for (std::size_t k = 0; k < traj.horizon(); ++k) {
    os << k;
    for (double v : traj.states[k]) os << "," << v;
    for (double v : traj.controls[k]) os << "," << v;
    os << "," << traj.stage_costs[k] << "\n";
  }
  os.precision(old_prec);
}

AuditReport audit_cost(const Problem& prob, const Matrix& L, const Vector& x0, const Vector& p_star,
                       std::optional<std::size_t> horizon, double rel_tol) {
  const auto sys = view(prob);
  if (p_star.size() != sys.A.rows()) throw Error(ErrorCode::DimensionMismatch, "p* has the wrong length");
  const Vector p_policy = policy_evaluation(prob, L);  // throws Unstable

  AuditReport rep;
  if (horizon) {
    rep.horizon = *horizon;
  } else {
    const double rho = spectral_radius(closed_loop(sys.A, sys.B, L)).rho;
    const double steps = 10.0 * std::ceil(1.0 / std::max(1.0 - rho, 1e-12));
    rep.horizon = static_cast<std::size_t>(std::min(steps, 1e6));
  }
  const Trajectory traj = rollout(prob, L, x0, rep.horizon);
  const Vector& x_end = traj.states.back();
  rep.rollout_total = traj.total;
  rep.tail = dot(p_star, x_end);
  rep.predicted = dot(x0, p_star);
  rep.discrepancy = std::fabs(rep.rollout_total + rep.tail - rep.predicted);
  rep.passed = rep.discrepancy <= rel_tol * rep.predicted;
  rep.policy_cost = dot(x0, p_policy);
  const double own = rep.rollout_total + dot(p_policy, x_end);
  rep.lower_bound_holds = own >= rep.predicted - 1e-9 * std::max(1.0, rep.predicted);
  return rep;
}

}  // namespace poslin
