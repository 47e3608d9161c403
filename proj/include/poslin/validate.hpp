#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "poslin/model.hpp"

namespace poslin {

inline constexpr double kDefaultValidationTol = 1e-12;

/// Location and value of the worst violation of a check.
struct Witness {
  std::vector<std::size_t> index;  // {i} for vectors, {i, j} for matrices
  double value = 0.0;
};

struct Check {
  std::string name;
  bool passed = false;
  std::optional<Witness> witness;  // present iff !passed
};

struct ValidationReport {
  bool passed = false;
  std::vector<Check> checks;
  /// (s' - |r'|E) sum_{i<n} (A - |B|E)^i, or its norm-case counterpart.
  Vector observability_vector;

  const Check* find(std::string_view name) const;
};

/// Check names used in reports.
namespace checks {
inline constexpr const char* kGainNonnegative = "gain_nonnegative";       // E >= 0 or N >= 0
inline constexpr const char* kDynamicsDominance = "dynamics_dominance";   // A >= |B|E
inline constexpr const char* kCostDominance = "cost_dominance";           // s >= E'|r|
inline constexpr const char* kObservability = "observability";
}  // namespace checks

/// Positivity assumptions for the absolute-value bound problem.
ValidationReport check_abs(const AbsProblem& p, double tol = kDefaultValidationTol);
/// Positivity assumptions for the norm bound problem.
ValidationReport check_norm(const NormProblem& p, double tol = kDefaultValidationTol);
ValidationReport validate(const Problem& p, double tol = kDefaultValidationTol);

/// The worst-case open-loop matrix A - |B|E (abs) or A - beta N with
/// beta_i = ||B_i'||_* (norm). Nonnegative under the assumptions.
Matrix lower_closed_loop(const AbsProblem& p);
Matrix lower_closed_loop(const NormProblem& p);

/// The worst-case stage cost s - E'|r| (abs) or s - N'||r||_* (norm).
Vector lower_stage_cost(const AbsProblem& p);
Vector lower_stage_cost(const NormProblem& p);

/// Smallest l in [1, max_len] with v' sum_{j<l} M^j > threshold entrywise,
/// or nullopt. Requires v >= 0 and M >= 0 (throws InvalidArgument).
std::optional<std::size_t> observability_horizon(std::span<const double> v, const Matrix& m,
                                                 std::size_t max_len, double threshold = 0.0);

/// sum_{i<n} M^i > 0 entrywise. A 1x1 matrix is always irreducible under this
/// test, including [[0]], since the sum reduces to the identity.
bool is_irreducible(const Matrix& m);

}  // namespace poslin
