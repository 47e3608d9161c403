#pragma once

#include <cstddef>
#include <vector>

#include "poslin/model.hpp"

namespace poslin {

// Bellman operators restricted to linear costs J(x) = x'p. All of them accept
// any finite p, not only p >= 0, so negative fixed points can be examined.

/// G(p) = s + A'p - E'|r + B'p|
Vector apply_G(std::span<const double> p, const AbsProblem& prob);
/// G_L(p) = s + L'r + (A + BL)'p. Throws Error(Infeasible) unless |L| <= E.
Vector apply_G_L(std::span<const double> p, const Matrix& L, const AbsProblem& prob);

/// F(p) = s + A'p - N'||r + B'p||_*
Vector apply_F(std::span<const double> p, const NormProblem& prob);
/// F_L(p) = s + L'r + (A + BL)'p. Throws Error(Infeasible) unless L = -wN, ||w|| <= 1.
Vector apply_F_L(std::span<const double> p, const Matrix& L, const NormProblem& prob);

/// G or F depending on the problem class.
Vector apply_bellman(std::span<const double> p, const Problem& prob);
Vector apply_bellman(std::span<const double> p, const AbsProblem& prob);
Vector apply_bellman(std::span<const double> p, const NormProblem& prob);
/// G_L or F_L depending on the problem class.
Vector apply_policy_bellman(std::span<const double> p, const Matrix& L, const Problem& prob);
Vector apply_policy_bellman(std::span<const double> p, const Matrix& L, const AbsProblem& prob);
Vector apply_policy_bellman(std::span<const double> p, const Matrix& L, const NormProblem& prob);

/// sign(x) with sign(0) = +1.
constexpr double sign_nonneg(double x) noexcept { return x >= 0.0 ? 1.0 : -1.0; }

/// Row i of L is -sign(r_i + b_i'p) E_i. Attains G_L(p) = G(p).
Matrix greedy_abs(std::span<const double> p, const AbsProblem& prob);

/// One element w of the dual-norm subdifferential of v.
struct SubgradientChoice {
  Vector w;
  bool on_boundary = false;  // ||w|| = 1; false only for v = 0, where w = 0
};

/// Deterministic representative: Two -> v/||v||_2; One -> signed unit vector
/// at the smallest index maximising |v_i|; Inf -> elementwise sign with
/// sign(0) = +1. For v = 0 returns w = 0.
SubgradientChoice subgradient(std::span<const double> v, NormKind norm);

/// L = -w N with w = subgradient(r + B'p). Attains F_L(p) = F(p).
Matrix greedy_norm(std::span<const double> p, const NormProblem& prob);

Matrix greedy(std::span<const double> p, const Problem& prob);
Matrix greedy(std::span<const double> p, const AbsProblem& prob);
Matrix greedy(std::span<const double> p, const NormProblem& prob);

/// The optimal linear gains of the abs problem at p*: rows with
/// |r_i + b_i'p*| > tol are pinned to the greedy row, the others may be any
/// row with |L_i| <= E_i.
struct OptimalPolicySet {
  Matrix L_bar;
  std::vector<std::size_t> free_rows;

  bool is_free(std::size_t row) const;
  /// |L| <= E and every pinned row matches L_bar to `tol`.
  bool contains(const Matrix& L, const AbsProblem& prob, double tol = 1e-9) const;
};

OptimalPolicySet optimal_policy_set_abs(std::span<const double> p_star, const AbsProblem& prob,
                                        double tol = 1e-9);

}  // namespace poslin
