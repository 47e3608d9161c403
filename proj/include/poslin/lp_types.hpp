#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poslin/matrix.hpp"

namespace poslin {

enum class LpStatus { Optimal, Unbounded, Infeasible };

std::string_view to_string(LpStatus s);

/// maximize c'x  s.t.  A_eq x = b_eq,  A_le x <= b_le,  x_j >= 0 unless
/// `free_vars[j]` is set (then x_j is unrestricted).
struct LinearProgram {
  Vector objective;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_le;
  Vector b_le;
  std::vector<bool> free_vars;
  /// Optional labels used by the text dump.
  std::vector<std::string> var_names;

  std::size_t num_vars() const noexcept { return objective.size(); }
};

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::optional<Vector> x;
  std::optional<double> value;
  /// Basic columns of the final phase-two tableau (standard-form indices).
  std::optional<std::vector<std::size_t>> basis;
  std::size_t pivots = 0;
};

}  // namespace poslin
