#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "poslin/lp_types.hpp"
#include "poslin/model.hpp"
#include "poslin/spectral.hpp"

namespace poslin {

enum class SolveStatus { Converged, Diverged, IterLimit };
enum class Method { VI, PI, OPI, LP };

std::string_view to_string(SolveStatus s);
std::string_view to_string(Method m);

struct SolverOptions {
  double tol = 1e-10;                 // sup-norm
  std::size_t max_iter = 100000;
  double stability_margin = kDefaultStabilityMargin;
  /// Divergence is declared once ||p_k||_inf exceeds this.
  double divergence_bound = 1e12;
  bool record_history = false;   // (iteration, residual) pairs
  bool record_iterates = false;  // full p_k sequence, and L_k for OPI/PI
};

struct HistoryEntry {
  std::size_t iteration = 0;
  double residual = 0.0;
};

struct SolveResult {
  Method method = Method::VI;
  SolveStatus status = SolveStatus::IterLimit;
  std::optional<Vector> p_star;
  std::optional<Policy> policy;
  /// VI/OPI sweeps, PI improvement steps, or simplex pivots.
  std::size_t iterations = 0;
  std::vector<HistoryEntry> history;
  /// ||p - T(p)||_inf at the returned point, T = G or F.
  std::optional<double> certificate;
  std::optional<LpStatus> lp_status;
  /// OPI, abs class: first k from which every L_k is an optimal gain.
  std::optional<std::size_t> first_optimal_policy_index;

  std::vector<Vector> iterates;
  std::vector<Matrix> policies;
};

/// Cycled sequence of positive sweep counts l_k for optimistic PI.
class OpiSchedule {
 public:
  explicit OpiSchedule(std::size_t fixed = 1);
  explicit OpiSchedule(std::vector<std::size_t> lengths);

  std::size_t at(std::size_t k) const { return lengths_[k % lengths_.size()]; }
  const std::vector<std::size_t>& lengths() const { return lengths_; }

 private:
  std::vector<std::size_t> lengths_;
};

/// p_{k+1} = T(p_k) from p0 >= 0.
SolveResult value_iteration(const Problem& prob, const Vector& p0, const SolverOptions& opts = {});

/// Solves (I - A - BL)'p = s + L'r. Throws Infeasible for a gain outside the
/// feasible set, Unstable if rho(A + BL) >= 1 - margin, Singular otherwise.
Vector policy_evaluation(const Problem& prob, const Matrix& L,
                         double margin = kDefaultStabilityMargin);

/// Exact policy iteration for the abs class. Terminates in at most 2^m
/// improvements from a sign-pattern gain; exceeding 2^m + 1 raises
/// InternalConsistency.
SolveResult policy_iteration_abs(const AbsProblem& prob, std::optional<Matrix> L0 = std::nullopt,
                                 const SolverOptions& opts = {});

/// Policy iteration for the norm class; stops when successive evaluations
/// agree to `opts.tol`.
SolveResult policy_iteration_norm(const NormProblem& prob, std::optional<Matrix> L0 = std::nullopt,
                                  const SolverOptions& opts = {});

SolveResult policy_iteration(const Problem& prob, std::optional<Matrix> L0 = std::nullopt,
                             const SolverOptions& opts = {});

/// Optimistic PI: greedy gain at p_k followed by l_k sweeps of T_L.
/// Throws InvalidSeed unless p0 >= T(p0) (up to rounding).
SolveResult optimistic_pi(const Problem& prob, std::optional<Vector> p0, const OpiSchedule& schedule,
                          const SolverOptions& opts = {});

/// Runs VI from zero until the greedy gain is stable. Throws
/// NoStabilizingPolicy if VI diverges or exhausts its budget first.
Matrix find_initial_policy(const Problem& prob, const SolverOptions& opts = {});

/// policy_evaluation(find_initial_policy(prob)); satisfies T(p) <= p.
Vector find_opi_seed(const Problem& prob, const SolverOptions& opts = {});

/// Fills Policy{L, feasible, rho(A + BL)} for reporting.
Policy certify_policy(const Problem& prob, const Matrix& L);

}  // namespace poslin
