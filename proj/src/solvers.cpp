#include "poslin/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "poslin/bellman.hpp"
#include "poslin/error.hpp"

namespace poslin {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::IterLimit: return "iter_limit";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::VI: return "vi";
    case Method::PI: return "pi";
    case Method::OPI: return "opi";
    case Method::LP: return "lp";
  }
  return "?";
}

OpiSchedule::OpiSchedule(std::size_t fixed) : OpiSchedule(std::vector<std::size_t>{fixed}) {}

OpiSchedule::OpiSchedule(std::vector<std::size_t> lengths) : lengths_(std::move(lengths)) {
  if (lengths_.empty()) throw Error(ErrorCode::InvalidArgument, "OPI schedule is empty");
  if (std::any_of(lengths_.begin(), lengths_.end(), [](std::size_t l) { return l == 0; })) {
    throw Error(ErrorCode::InvalidArgument, "OPI sweep lengths must be positive");
  }
}

namespace {

// Residual growth over `needed` consecutive windows after a warmup, or an
// iterate beyond `bound`, is treated as divergence.
class DivergenceMonitor {
 public:
  DivergenceMonitor(std::size_t n, double bound) : needed_(std::max<std::size_t>(n, 1)), bound_(bound) {}

  bool diverged(std::size_t k, std::span<const double> next, double residual) {
    if (!all_finite(next) || max_abs(next) > bound_) return true;
    if (k < kWarmup || k % kWindow != 0) return false;
    growth_ = (last_ >= 0.0 && residual > last_) ? growth_ + 1 : 0;
    last_ = residual;
    return growth_ >= needed_;
  }

 private:
  static constexpr std::size_t kWarmup = 1000;
  static constexpr std::size_t kWindow = 100;
  std::size_t needed_;
  double bound_;
  double last_ = -1.0;
  std::size_t growth_ = 0;
};

const Matrix& system_A(const Problem& p) { return std::visit([](const auto& q) -> const Matrix& { return q.A; }, p); }
const Matrix& system_B(const Problem& p) { return std::visit([](const auto& q) -> const Matrix& { return q.B; }, p); }

void require_length(const Vector& p, std::size_t n, const char* what) {
  if (p.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " +
                                                  std::to_string(p.size()) + ", expected " +
                                                  std::to_string(n));
  }
}

double residual(const Problem& prob, const Vector& p) { return max_abs_diff(apply_bellman(p, prob), p); }

bool stable_gain(const Problem& prob, const Matrix& L, double margin) {
  if (!is_feasible_gain(L, prob, 1e-12)) return false;
  try {
    return is_stable(closed_loop(system_A(prob), system_B(prob), L), margin);
  } catch (const Error&) {
    // negative closed loop: only possible for instances violating the assumptions
    return false;
  }
}

std::size_t pi_improvement_cap(std::size_t m) {
  if (m >= 62) return std::numeric_limits<std::size_t>::max();
  return (std::size_t{1} << m) + 1;
}

double scaled_tol(double tol, std::span<const double> p) { return tol * std::max(1.0, max_abs(p)); }

void finish_converged(SolveResult& res, const Problem& prob, Vector p, double cert) {
  res.status = SolveStatus::Converged;
  res.certificate = cert;
  res.policy = certify_policy(prob, greedy(p, prob));
  res.p_star = std::move(p);
}

}  // namespace

Policy certify_policy(const Problem& prob, const Matrix& L) {
  Policy pol{L, is_feasible_gain(L, prob, 1e-12), std::nullopt};
  try {
    pol.spectral_radius = spectral_radius(closed_loop(system_A(prob), system_B(prob), L)).rho;
  } catch (const Error&) {
  }
  return pol;
}

SolveResult value_iteration(const Problem& prob, const Vector& p0, const SolverOptions& opts) {
  const std::size_t n = state_dim(prob);
  require_length(p0, n, "p0");
  if (!all_finite(p0) || std::any_of(p0.begin(), p0.end(), [](double x) { return x < 0.0; })) {
    throw Error(ErrorCode::InvalidArgument, "value iteration needs a finite p0 >= 0");
  }
  SolveResult res;
  res.method = Method::VI;
  DivergenceMonitor monitor(n, opts.divergence_bound);

  Vector p = p0;
  if (opts.record_iterates) res.iterates.push_back(p);
  for (std::size_t k = 0; k < opts.max_iter; ++k) {
    Vector next = apply_bellman(p, prob);
    const double step = max_abs_diff(next, p);
    res.iterations = k;
    if (opts.record_history) res.history.push_back({k, step});
    if (step <= opts.tol) {
      finish_converged(res, prob, std::move(p), step);
      return res;
    }
    if (monitor.diverged(k + 1, next, step)) {
      res.status = SolveStatus::Diverged;
      res.iterations = k + 1;
      if (opts.record_iterates) res.iterates.push_back(next);
      return res;
    }
    p = std::move(next);
    if (opts.record_iterates) res.iterates.push_back(p);
  }
  res.status = SolveStatus::IterLimit;
  res.iterations = opts.max_iter;
  return res;
}

Vector policy_evaluation(const Problem& prob, const Matrix& L, double margin) {
  const std::size_t n = state_dim(prob);
  if (L.rows() != control_dim(prob) || L.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "gain must be " + std::to_string(control_dim(prob)) +
                                                  "x" + std::to_string(n));
  }
  if (!is_feasible_gain(L, prob, 1e-12)) throw Error(ErrorCode::Infeasible, "gain is not feasible");
  const Matrix loop = closed_loop(system_A(prob), system_B(prob), L);
  bool stable = false;
  try {
    stable = is_stable(loop, margin);
  } catch (const Error& e) {
    throw Error(ErrorCode::Unstable, std::string("closed loop is not a positive system: ") + e.what());
  }
  if (!stable) throw Error(ErrorCode::Unstable, "closed loop A + BL is not stable");

  const Vector& s = std::visit([](const auto& q) -> const Vector& { return q.s; }, prob);
  const Vector& r = std::visit([](const auto& q) -> const Vector& { return q.r; }, prob);
  // (I - A - BL)' p = s + L'r
  Matrix lhs = (Matrix::identity(n) - loop).transposed();
  return solve_linear(std::move(lhs), add(s, multiply_transposed(L, r)));
}

namespace {

SolveResult run_policy_iteration(const Problem& prob, std::optional<Matrix> L0, const SolverOptions& opts,
                                 bool finite_class) {
  Matrix L = L0 ? std::move(*L0) : find_initial_policy(prob, opts);
  if (!is_feasible_gain(L, prob, 1e-12)) throw Error(ErrorCode::Infeasible, "initial gain is not feasible");

  SolveResult res;
  res.method = Method::PI;
  Vector p = policy_evaluation(prob, L, opts.stability_margin);
  if (opts.record_iterates) {
    res.iterates.push_back(p);
    res.policies.push_back(L);
  }

  const std::size_t limit = finite_class ? pi_improvement_cap(control_dim(prob)) : opts.max_iter;
  for (std::size_t k = 1; k <= limit; ++k) {
    Matrix next_L = greedy(p, prob);
    Vector next_p = (next_L == L) ? p : policy_evaluation(prob, next_L, opts.stability_margin);
    const double change = max_abs_diff(next_p, p);
    if (opts.record_history) res.history.push_back({k, change});
    if (opts.record_iterates) {
      res.iterates.push_back(next_p);
      res.policies.push_back(next_L);
    }
    res.iterations = k;
    L = std::move(next_L);
    p = std::move(next_p);
    if (change <= scaled_tol(opts.tol, p)) {
      const double cert = residual(prob, p);
      res.status = SolveStatus::Converged;
      res.certificate = cert;
      res.policy = certify_policy(prob, L);
      res.p_star = std::move(p);
      return res;
    }
  }
  if (finite_class) {
    throw Error(ErrorCode::InternalConsistency,
                "policy iteration exceeded 2^m + 1 improvements without terminating");
  }
  res.status = SolveStatus::IterLimit;
  return res;
}

}  // namespace

SolveResult policy_iteration_abs(const AbsProblem& prob, std::optional<Matrix> L0, const SolverOptions& opts) {
  return run_policy_iteration(Problem{prob}, std::move(L0), opts, true);
}

SolveResult policy_iteration_norm(const NormProblem& prob, std::optional<Matrix> L0, const SolverOptions& opts) {
  return run_policy_iteration(Problem{prob}, std::move(L0), opts, false);
}

SolveResult policy_iteration(const Problem& prob, std::optional<Matrix> L0, const SolverOptions& opts) {
  return run_policy_iteration(prob, std::move(L0), opts, std::holds_alternative<AbsProblem>(prob));
}

SolveResult optimistic_pi(const Problem& prob, std::optional<Vector> p0, const OpiSchedule& schedule,
                          const SolverOptions& opts) {
  const std::size_t n = state_dim(prob);
  Vector p = p0 ? std::move(*p0) : find_opi_seed(prob, opts);
  require_length(p, n, "OPI seed");
  if (!all_finite(p) || std::any_of(p.begin(), p.end(), [](double x) { return x < 0.0; })) {
    throw Error(ErrorCode::InvalidSeed, "OPI seed must be finite and nonnegative");
  }
  {
    const Vector tp = apply_bellman(p, prob);
    const double slack = 1e-9 * std::max(1.0, max_abs(p));
    for (std::size_t i = 0; i < n; ++i) {
      if (tp[i] > p[i] + slack) {
        throw Error(ErrorCode::InvalidSeed, "OPI seed violates p0 >= T(p0) at index " + std::to_string(i) +
                                                ": T(p0) = " + std::to_string(tp[i]) +
                                                " > p0 = " + std::to_string(p[i]));
      }
    }
  }

  SolveResult res;
  res.method = Method::OPI;
  std::vector<Matrix> gains;
  if (opts.record_iterates) res.iterates.push_back(p);

  for (std::size_t k = 0; k < opts.max_iter; ++k) {
    Matrix L = greedy(p, prob);
    Vector q = apply_policy_bellman(p, L, prob);  // equals T(p)
    const double step = max_abs_diff(q, p);
    gains.push_back(L);
    res.iterations = k;
    if (opts.record_history) res.history.push_back({k, step});
    if (step <= opts.tol) {
      if (const auto* abs_prob = std::get_if<AbsProblem>(&prob)) {
        const OptimalPolicySet opt = optimal_policy_set_abs(p, *abs_prob, 1e3 * scaled_tol(opts.tol, p));
        std::optional<std::size_t> first;
        for (std::size_t j = gains.size(); j-- > 0;) {
          if (!opt.contains(gains[j], *abs_prob)) break;
          first = j;
        }
        res.first_optimal_policy_index = first;
      }
      if (opts.record_iterates) res.policies = std::move(gains);
      finish_converged(res, prob, std::move(p), step);
      return res;
    }
    for (std::size_t sweep = 1; sweep < schedule.at(k); ++sweep) q = apply_policy_bellman(q, L, prob);
    if (!all_finite(q) || max_abs(q) > opts.divergence_bound) {
      res.status = SolveStatus::Diverged;
      return res;
    }
    p = std::move(q);
    if (opts.record_iterates) res.iterates.push_back(p);
  }
  if (opts.record_iterates) res.policies = std::move(gains);
  res.status = SolveStatus::IterLimit;
  res.iterations = opts.max_iter;
  return res;
}

Matrix find_initial_policy(const Problem& prob, const SolverOptions& opts) {
  const std::size_t n = state_dim(prob);
  DivergenceMonitor monitor(n, opts.divergence_bound);
  Vector p(n, 0.0);
  std::optional<Matrix> last_checked;
  for (std::size_t k = 0; k < opts.max_iter; ++k) {
    Matrix L = greedy(p, prob);
    if (!last_checked || L != *last_checked) {
      if (stable_gain(prob, L, opts.stability_margin)) return L;
      last_checked = std::move(L);
    }
    Vector next = apply_bellman(p, prob);
    const double step = max_abs_diff(next, p);
    if (monitor.diverged(k + 1, next, step)) break;
    if (step <= opts.tol) {
      Matrix last = greedy(next, prob);
      if (stable_gain(prob, last, opts.stability_margin)) return last;
      break;
    }
    p = std::move(next);
  }
  throw Error(ErrorCode::NoStabilizingPolicy,
              "no stabilizing linear gain found; the optimal cost is infinite");
}

Vector find_opi_seed(const Problem& prob, const SolverOptions& opts) {
  return policy_evaluation(prob, find_initial_policy(prob, opts), opts.stability_margin);
}

}  // namespace poslin
