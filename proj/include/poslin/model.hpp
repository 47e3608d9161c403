#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "poslin/matrix.hpp"

namespace poslin {

/// Norm used in the control constraint ||u|| <= N x.
enum class NormKind { One, Two, Inf };

/// Dual pairing: One <-> Inf, Two <-> Two.
constexpr NormKind dual(NormKind k) noexcept {
  switch (k) {
    case NormKind::One: return NormKind::Inf;
    case NormKind::Inf: return NormKind::One;
    case NormKind::Two: return NormKind::Two;
  }
  return k;
}

std::string_view to_string(NormKind k);
/// Accepts "one", "two", "inf"; throws Error(UnknownNorm) otherwise.
NormKind parse_norm_kind(std::string_view name);

/// ||v|| in the given norm.
double norm(std::span<const double> v, NormKind kind);

/// ||v||_* where `constraint_norm` is the norm bounding the control. For
/// One this is max|v_i|, for Inf it is sum|v_i|, for Two the Euclidean length.
double dual_norm(std::span<const double> v, NormKind constraint_norm);

/// Elementwise |M|.
Matrix abs_matrix(const Matrix& m);

/// x+ = A x + B u, stage cost s'x + r'u, constraint |u| <= E x.
struct AbsProblem {
  Matrix A;  // n x n
  Matrix B;  // n x m
  Matrix E;  // m x n
  Vector s;  // n
  Vector r;  // m

  std::size_t n() const noexcept { return A.rows(); }
  std::size_t m() const noexcept { return B.cols(); }
};

/// x+ = A x + B u, stage cost s'x + r'u, constraint ||u|| <= N x.
struct NormProblem {
  Matrix A;  // n x n
  Matrix B;  // n x m
  Vector N;  // row vector, length n
  Vector s;  // n
  Vector r;  // m
  NormKind norm = NormKind::Two;

  std::size_t n() const noexcept { return A.rows(); }
  std::size_t m() const noexcept { return B.cols(); }
};

using Problem = std::variant<AbsProblem, NormProblem>;

/// Throws Error(DimensionMismatch / NonFinite) when the data are not a
/// well-formed instance. Does not check the positivity assumptions.
void check_shape(const AbsProblem& p);
void check_shape(const NormProblem& p);
void check_shape(const Problem& p);

std::size_t state_dim(const Problem& p);
std::size_t control_dim(const Problem& p);

/// Linear feedback u = L x.
struct Policy {
  Matrix L;  // m x n
  bool feasible = false;
  std::optional<double> spectral_radius;
};

/// |L| <= E elementwise (up to `tol`).
bool is_feasible_gain(const Matrix& L, const AbsProblem& p, double tol = 1e-12);
/// L = -w N for some ||w|| <= 1 (up to `tol`).
bool is_feasible_gain(const Matrix& L, const NormProblem& p, double tol = 1e-12);
bool is_feasible_gain(const Matrix& L, const Problem& p, double tol = 1e-12);

/// Recovers w with L = -w N. Returns nullopt if L is not of that rank-one
/// form; the returned w may still violate ||w|| <= 1.
std::optional<Vector> gain_direction(const Matrix& L, const Vector& N, double tol = 1e-12);

/// A + B L
Matrix closed_loop(const Matrix& A, const Matrix& B, const Matrix& L);

/// Parses the JSON problem format. Dimension-checked, assumptions unchecked.
Problem parse_problem(std::string_view json_text);
/// Inverse of parse_problem; doubles are written with round-trip precision.
std::string serialize_problem(const Problem& p);

}  // namespace poslin
