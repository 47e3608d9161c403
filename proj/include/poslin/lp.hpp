#pragma once

#include <iosfwd>
#include <string>

#include "poslin/lp_types.hpp"
#include "poslin/model.hpp"
#include "poslin/solvers.hpp"

namespace poslin {

struct SimplexOptions {
  double pivot_tol = 1e-9;
  /// Phase one declares infeasibility above this (scaled by max(1, ||b||_inf)).
  double feasibility_tol = 1e-9;
  std::size_t max_pivots = 1000000;
};

/// Dense two-phase primal simplex with Bland's rule.
LpOutcome simplex_solve(const LinearProgram& lp, const SimplexOptions& opts = {});

/// max 1'p  s.t.  (I - A')p + E'g = s,  -g <= r + B'p <= g,  p, g >= 0.
/// Variables are ordered (p_1..p_n, g_1..g_m).
LinearProgram build_abs_lp(const AbsProblem& prob);

/// max 1'p  s.t.  (I - A')p + N'g <= s,  ||r + B'p||_* <= g,  p, g >= 0.
/// Variables are (p_1..p_n, g) for norm One and (p_1..p_n, g, t_1..t_m) for
/// norm Inf. Throws Error(OutOfScope) for the Euclidean norm.
LinearProgram build_norm_program(const NormProblem& prob);

/// Solves the program above. Optimal: p* extracted and checked against
/// ||T(p*) - p*||_inf <= 1e-8 (ResidualCheck otherwise). Infeasible or
/// unbounded: status Diverged, i.e. the optimal cost is infinite.
SolveResult solve_via_lp(const Problem& prob, const SimplexOptions& opts = {});

inline constexpr double kLpResidualTol = 1e-8;

/// Human-readable rows of the program, one constraint per line.
void dump_lp(std::ostream& os, const LinearProgram& lp);

}  // namespace poslin
