#include "poslin/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poslin/error.hpp"

namespace poslin {

namespace {

void require_state_length(std::span<const double> p, std::size_t n) {
  if (p.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "cost vector has length " + std::to_string(p.size()) + ", expected " + std::to_string(n));
  }
}

double gain_tol(double scale) { return 1e-12 * std::max(1.0, scale); }

// s + L'r + (A + BL)'p, computed as s + L'(r + B'p) + A'p.
Vector policy_affine_map(std::span<const double> p, const Matrix& L, const Matrix& A,
                         const Matrix& B, const Vector& s, const Vector& r) {
  const Vector v = add(r, multiply_transposed(B, p));
  return add(add(s, multiply_transposed(A, p)), multiply_transposed(L, v));
}

}  // namespace

Vector apply_G(std::span<const double> p, const AbsProblem& prob) {
  require_state_length(p, prob.n());
  const Vector v = add(prob.r, multiply_transposed(prob.B, p));
  return subtract(add(prob.s, multiply_transposed(prob.A, p)), multiply_transposed(prob.E, abs(v)));
}

Vector apply_G_L(std::span<const double> p, const Matrix& L, const AbsProblem& prob) {
  require_state_length(p, prob.n());
  if (!is_feasible_gain(L, prob, gain_tol(max_abs(prob.E.data())))) {
    throw Error(ErrorCode::Infeasible, "gain violates |L| <= E");
  }
  return policy_affine_map(p, L, prob.A, prob.B, prob.s, prob.r);
}

Vector apply_F(std::span<const double> p, const NormProblem& prob) {
  require_state_length(p, prob.n());
  const Vector v = add(prob.r, multiply_transposed(prob.B, p));
  return subtract(add(prob.s, multiply_transposed(prob.A, p)), scale(dual_norm(v, prob.norm), prob.N));
}

Vector apply_F_L(std::span<const double> p, const Matrix& L, const NormProblem& prob) {
  require_state_length(p, prob.n());
  if (!is_feasible_gain(L, prob, gain_tol(max_abs(prob.N)))) {
    throw Error(ErrorCode::Infeasible, "gain is not of the form -wN with ||w|| <= 1");
  }
  return policy_affine_map(p, L, prob.A, prob.B, prob.s, prob.r);
}

Vector apply_bellman(std::span<const double> p, const AbsProblem& prob) { return apply_G(p, prob); }
Vector apply_bellman(std::span<const double> p, const NormProblem& prob) { return apply_F(p, prob); }
Vector apply_bellman(std::span<const double> p, const Problem& prob) {
  return std::visit([&](const auto& q) { return apply_bellman(p, q); }, prob);
}

Vector apply_policy_bellman(std::span<const double> p, const Matrix& L, const AbsProblem& prob) {
  return apply_G_L(p, L, prob);
}
Vector apply_policy_bellman(std::span<const double> p, const Matrix& L, const NormProblem& prob) {
  return apply_F_L(p, L, prob);
}
Vector apply_policy_bellman(std::span<const double> p, const Matrix& L, const Problem& prob) {
  return std::visit([&](const auto& q) { return apply_policy_bellman(p, L, q); }, prob);
}

Matrix greedy_abs(std::span<const double> p, const AbsProblem& prob) {
  require_state_length(p, prob.n());
  const Vector v = add(prob.r, multiply_transposed(prob.B, p));
  Matrix L(prob.m(), prob.n());
  for (std::size_t i = 0; i < prob.m(); ++i) {
    const double sg = sign_nonneg(v[i]);
    for (std::size_t j = 0; j < prob.n(); ++j) L(i, j) = -sg * prob.E(i, j);
  }
  return L;
}

SubgradientChoice subgradient(std::span<const double> v, NormKind norm) {
  SubgradientChoice out{Vector(v.size(), 0.0), false};
  if (max_abs(v) == 0.0) return out;
  out.on_boundary = true;
  switch (norm) {
    case NormKind::Two: {
      const double len = poslin::norm(v, NormKind::Two);
      for (std::size_t i = 0; i < v.size(); ++i) out.w[i] = v[i] / len;
      break;
    }
    case NormKind::One: {
      // dual is max-abs; first index attaining it
      std::size_t best = 0;
      for (std::size_t i = 1; i < v.size(); ++i)
        if (std::fabs(v[i]) > std::fabs(v[best])) best = i;
      out.w[best] = sign_nonneg(v[best]);
      break;
    }
    case NormKind::Inf: {
      for (std::size_t i = 0; i < v.size(); ++i) out.w[i] = sign_nonneg(v[i]);
      break;
    }
  }
  return out;
}

Matrix greedy_norm(std::span<const double> p, const NormProblem& prob) {
  require_state_length(p, prob.n());
  const Vector v = add(prob.r, multiply_transposed(prob.B, p));
  const Vector w = subgradient(v, prob.norm).w;
  Matrix L(prob.m(), prob.n());
  for (std::size_t i = 0; i < prob.m(); ++i)
    for (std::size_t j = 0; j < prob.n(); ++j) L(i, j) = -w[i] * prob.N[j];
  return L;
}

Matrix greedy(std::span<const double> p, const AbsProblem& prob) { return greedy_abs(p, prob); }
Matrix greedy(std::span<const double> p, const NormProblem& prob) { return greedy_norm(p, prob); }
Matrix greedy(std::span<const double> p, const Problem& prob) {
  return std::visit([&](const auto& q) { return greedy(p, q); }, prob);
}

bool OptimalPolicySet::is_free(std::size_t row) const {
  return std::find(free_rows.begin(), free_rows.end(), row) != free_rows.end();
}

bool OptimalPolicySet::contains(const Matrix& L, const AbsProblem& prob, double tol) const {
  if (!is_feasible_gain(L, prob, tol)) return false;
  for (std::size_t i = 0; i < L.rows(); ++i) {
    if (is_free(i)) continue;
    for (std::size_t j = 0; j < L.cols(); ++j)
      if (std::fabs(L(i, j) - L_bar(i, j)) > tol) return false;
  }
  return true;
}

OptimalPolicySet optimal_policy_set_abs(std::span<const double> p_star, const AbsProblem& prob,
                                        double tol) {
  OptimalPolicySet set{greedy_abs(p_star, prob), {}};
  const Vector v = add(prob.r, multiply_transposed(prob.B, p_star));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::fabs(v[i]) <= tol) set.free_rows.push_back(i);
  return set;
}

}  // namespace poslin
