#include "poslin/validate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poslin/error.hpp"
#include "poslin/spectral.hpp"

namespace poslin {

const Check* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

// Entry >= -tol everywhere; on failure the witness is the most negative entry.
Check nonnegative_check(const char* name, const Matrix& m, double tol) {
  Check c{name, true, std::nullopt};
  double worst = -tol;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) < worst) {
        worst = m(i, j);
        c.passed = false;
        c.witness = Witness{{i, j}, m(i, j)};
      }
    }
  }
  return c;
}

Check nonnegative_check(const char* name, const Vector& v, double tol) {
  Check c{name, true, std::nullopt};
  double worst = -tol;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < worst) {
      worst = v[i];
      c.passed = false;
      c.witness = Witness{{i}, v[i]};
    }
  }
  return c;
}

// Entry > tol everywhere; on failure the witness is the smallest entry.
Check strictly_positive_check(const char* name, const Vector& v, double tol) {
  Check c{name, true, std::nullopt};
  if (v.empty()) return c;
  const auto it = std::min_element(v.begin(), v.end());
  if (!(*it > tol)) {
    c.passed = false;
    c.witness = Witness{{static_cast<std::size_t>(it - v.begin())}, *it};
  }
  return c;
}

ValidationReport assemble(Check gain, const Matrix& lower_loop, const Vector& lower_cost, double tol) {
  ValidationReport rep;
  rep.checks.push_back(std::move(gain));
  rep.checks.push_back(nonnegative_check(checks::kDynamicsDominance, lower_loop, tol));
  rep.checks.push_back(nonnegative_check(checks::kCostDominance, lower_cost, tol));
  rep.observability_vector = neumann_sum(lower_cost, lower_loop, lower_loop.rows());
  rep.checks.push_back(strictly_positive_check(checks::kObservability, rep.observability_vector, tol));
  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.passed; });
  return rep;
}

Vector row_dual_norms(const Matrix& B, NormKind norm) {
  Vector beta(B.rows());
  for (std::size_t i = 0; i < B.rows(); ++i) beta[i] = dual_norm(B.row(i), norm);
  return beta;
}

}  // namespace

Matrix lower_closed_loop(const AbsProblem& p) { return p.A - abs(p.B) * p.E; }

Matrix lower_closed_loop(const NormProblem& p) {
  const Vector beta = row_dual_norms(p.B, p.norm);
  Matrix out = p.A;
  for (std::size_t i = 0; i < p.n(); ++i)
    for (std::size_t j = 0; j < p.n(); ++j) out(i, j) -= beta[i] * p.N[j];
  return out;
}

Vector lower_stage_cost(const AbsProblem& p) {
  return subtract(p.s, multiply_transposed(p.E, abs(p.r)));
}

Vector lower_stage_cost(const NormProblem& p) {
  return subtract(p.s, scale(dual_norm(p.r, p.norm), p.N));
}

ValidationReport check_abs(const AbsProblem& p, double tol) {
  check_shape(p);
  return assemble(nonnegative_check(checks::kGainNonnegative, p.E, tol), lower_closed_loop(p),
                  lower_stage_cost(p), tol);
}

ValidationReport check_norm(const NormProblem& p, double tol) {
  check_shape(p);
  return assemble(nonnegative_check(checks::kGainNonnegative, p.N, tol), lower_closed_loop(p),
                  lower_stage_cost(p), tol);
}

ValidationReport validate(const Problem& p, double tol) {
  return std::visit(
      [tol](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, AbsProblem>) return check_abs(q, tol);
        else return check_norm(q, tol);
      },
      p);
}

std::optional<std::size_t> observability_horizon(std::span<const double> v, const Matrix& m,
                                                 std::size_t max_len, double threshold) {
  if (!m.is_square() || m.rows() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch, "observability_horizon: dimensions differ");
  }
  if (std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; }) || m.min_entry() < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "observability_horizon: inputs must be nonnegative");
  }
  Vector acc(v.size(), 0.0);
  Vector term(v.begin(), v.end());
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += term[j];
    if (std::all_of(acc.begin(), acc.end(), [threshold](double x) { return x > threshold; })) return len;
    term = multiply_transposed(m, term);
  }
  return std::nullopt;
}

bool is_irreducible(const Matrix& m) {
  if (!m.is_square()) throw Error(ErrorCode::InvalidArgument, "is_irreducible: matrix must be square");
  if (m.min_entry() < 0.0) throw Error(ErrorCode::InvalidArgument, "is_irreducible: negative entries");
  const std::size_t n = m.rows();
  Matrix sum = Matrix::identity(n);
  Matrix power = Matrix::identity(n);
  for (std::size_t i = 1; i < n; ++i) {
    power = power * m;
    sum = sum + power;
  }
  return sum.min_entry() > 0.0;
}

}  // namespace poslin
