#include "poslin/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "poslin/bellman.hpp"
#include "poslin/error.hpp"

namespace poslin {

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Infeasible: return "infeasible";
  }
  return "?";
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void check_lp(const LinearProgram& lp) {
  const std::size_t nv = lp.num_vars();
  auto bad = [](const std::string& what) { throw Error(ErrorCode::DimensionMismatch, "linear program: " + what); };
  if (lp.A_eq.rows() != lp.b_eq.size()) bad("A_eq and b_eq disagree");
  if (lp.A_le.rows() != lp.b_le.size()) bad("A_le and b_le disagree");
  if (lp.A_eq.rows() > 0 && lp.A_eq.cols() != nv) bad("A_eq has the wrong number of columns");
  if (lp.A_le.rows() > 0 && lp.A_le.cols() != nv) bad("A_le has the wrong number of columns");
  if (!lp.free_vars.empty() && lp.free_vars.size() != nv) bad("free_vars has the wrong length");
  if (!all_finite(lp.objective) || !lp.A_eq.all_finite() || !lp.A_le.all_finite() || !all_finite(lp.b_eq) ||
      !all_finite(lp.b_le)) {
    throw Error(ErrorCode::NonFinite, "linear program has non-finite data");
  }
}

// Dense tableau: rows 0..m-1 are constraints, row m holds reduced costs of
// the current minimisation objective with -z in the right-hand side column.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : t_(rows + 1, cols + 1), basis_(rows, kNone), m_(rows), n_(cols) {}

  double& at(std::size_t i, std::size_t j) { return t_(i, j); }
  double at(std::size_t i, std::size_t j) const { return t_(i, j); }
  double& rhs(std::size_t i) { return t_(i, n_); }
  double rhs(std::size_t i) const { return t_(i, n_); }
  double& cost(std::size_t j) { return t_(m_, j); }
  double objective_rhs() const { return t_(m_, n_); }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double inv = 1.0 / t_(r, c);
    for (std::size_t j = 0; j <= n_; ++j) t_(r, j) *= inv;
    t_(r, c) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) t_(i, j) -= f * t_(r, j);
      t_(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  /// Sets the objective row for minimising cost'x given the current basis.
  void set_objective(const Vector& cost_vec) {
    for (std::size_t j = 0; j < n_; ++j) t_(m_, j) = cost_vec[j];
    t_(m_, n_) = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_vec[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) t_(m_, j) -= cb * t_(i, j);
    }
  }

  enum class Run { Optimal, Unbounded };

  /// Bland's rule: lowest-index improving column, lowest-index leaving
  /// variable among ratio ties.
  Run minimise(const std::vector<bool>& allowed, double tol, std::size_t& pivots, std::size_t max_pivots) {
    for (;;) {
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < n_; ++j) {
        if (allowed[j] && t_(m_, j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter == kNone) return Run::Optimal;

      std::size_t leave = kNone;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a <= tol) continue;
        const double ratio = t_(i, n_) / a;
        if (leave == kNone) {
          best = ratio;
          leave = i;
          continue;
        }
        const double eps = 1e-12 * std::max(1.0, std::fabs(best));
        if (ratio < best - eps) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + eps && basis_[i] < basis_[leave]) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == kNone) return Run::Unbounded;
      pivot(leave, enter);
      if (++pivots > max_pivots) throw Error(ErrorCode::NotConverged, "simplex pivot limit reached");
    }
  }

 private:
  Matrix t_;
  std::vector<std::size_t> basis_;
  std::size_t m_;
  std::size_t n_;
};

}  // namespace

LpOutcome simplex_solve(const LinearProgram& lp, const SimplexOptions& opts) {
  check_lp(lp);
  const std::size_t nv = lp.num_vars();
  const std::size_t m_eq = lp.b_eq.size();
  const std::size_t m_le = lp.b_le.size();
  const std::size_t m = m_eq + m_le;

  // Column layout: split variables, slacks, artificials.
  std::vector<std::size_t> pos_col(nv), neg_col(nv, kNone);
  std::size_t ncols = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    pos_col[j] = ncols++;
    if (!lp.free_vars.empty() && lp.free_vars[j]) neg_col[j] = ncols++;
  }
  const std::size_t slack0 = ncols;
  ncols += m_le;

  auto row_coeff = [&](std::size_t i, std::size_t j) { return i < m_eq ? lp.A_eq(i, j) : lp.A_le(i - m_eq, j); };
  auto row_rhs = [&](std::size_t i) { return i < m_eq ? lp.b_eq[i] : lp.b_le[i - m_eq]; };

  std::vector<bool> needs_artificial(m, true);
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i >= m_eq && row_rhs(i) >= 0.0) needs_artificial[i] = false;
    if (needs_artificial[i]) ++n_art;
  }
  const std::size_t art0 = ncols;
  ncols += n_art;

  Tableau tab(m, ncols);
  double b_scale = 1.0;
  for (std::size_t i = 0, a = art0; i < m; ++i) {
    const double sign = row_rhs(i) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nv; ++j) {
      const double v = sign * row_coeff(i, j);
      tab.at(i, pos_col[j]) = v;
      if (neg_col[j] != kNone) tab.at(i, neg_col[j]) = -v;
    }
    if (i >= m_eq) tab.at(i, slack0 + (i - m_eq)) = sign;
    tab.rhs(i) = sign * row_rhs(i);
    b_scale = std::max(b_scale, std::fabs(row_rhs(i)));
    if (needs_artificial[i]) {
      tab.at(i, a) = 1.0;
      tab.basis()[i] = a++;
    } else {
      tab.basis()[i] = slack0 + (i - m_eq);
    }
  }

  LpOutcome out;
  std::vector<bool> allowed(ncols, true);

  if (n_art > 0) {
    Vector phase1(ncols, 0.0);
    for (std::size_t j = art0; j < ncols; ++j) phase1[j] = 1.0;
    tab.set_objective(phase1);
    tab.minimise(allowed, opts.pivot_tol, out.pivots, opts.max_pivots);
    const double infeasibility = -tab.objective_rhs();
    if (infeasibility > opts.feasibility_tol * b_scale) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Pivot zero-level artificials out where a structural column allows it;
    // rows where none does are redundant and keep their artificial at zero.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] < art0) continue;
      for (std::size_t j = 0; j < art0; ++j) {
        if (std::fabs(tab.at(i, j)) > opts.pivot_tol) {
          tab.pivot(i, j);
          ++out.pivots;
          break;
        }
      }
    }
    for (std::size_t j = art0; j < ncols; ++j) allowed[j] = false;
  }

  Vector phase2(ncols, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    phase2[pos_col[j]] = -lp.objective[j];
    if (neg_col[j] != kNone) phase2[neg_col[j]] = lp.objective[j];
  }
  tab.set_objective(phase2);
  if (tab.minimise(allowed, opts.pivot_tol, out.pivots, opts.max_pivots) == Tableau::Run::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  Vector col_value(ncols, 0.0);
  for (std::size_t i = 0; i < m; ++i) col_value[tab.basis()[i]] = tab.rhs(i);
  Vector x(nv, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    x[j] = col_value[pos_col[j]];
    if (neg_col[j] != kNone) x[j] -= col_value[neg_col[j]];
  }
  out.status = LpStatus::Optimal;
  out.value = dot(lp.objective, x);
  out.x = std::move(x);
  out.basis = tab.basis();
  return out;
}

LinearProgram build_abs_lp(const AbsProblem& prob) {
  check_shape(prob);
  const std::size_t n = prob.n();
  const std::size_t m = prob.m();
  LinearProgram lp;
  lp.objective.assign(n + m, 0.0);
  std::fill_n(lp.objective.begin(), n, 1.0);

  // (I - A')p + E'g = s
  lp.A_eq = Matrix(n, n + m);
  lp.b_eq = prob.s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lp.A_eq(i, j) = (i == j ? 1.0 : 0.0) - prob.A(j, i);
    for (std::size_t k = 0; k < m; ++k) lp.A_eq(i, n + k) = prob.E(k, i);
  }
  // B'p - g <= -r  and  -B'p - g <= r
  lp.A_le = Matrix(2 * m, n + m);
  lp.b_le.assign(2 * m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      lp.A_le(2 * k, j) = prob.B(j, k);
      lp.A_le(2 * k + 1, j) = -prob.B(j, k);
    }
    lp.A_le(2 * k, n + k) = -1.0;
    lp.A_le(2 * k + 1, n + k) = -1.0;
    lp.b_le[2 * k] = -prob.r[k];
    lp.b_le[2 * k + 1] = prob.r[k];
  }
  lp.free_vars.assign(n + m, false);
  for (std::size_t j = 0; j < n; ++j) lp.var_names.push_back("p" + std::to_string(j + 1));
  for (std::size_t k = 0; k < m; ++k) lp.var_names.push_back("g" + std::to_string(k + 1));
  return lp;
}

LinearProgram build_norm_program(const NormProblem& prob) {
  check_shape(prob);
  if (prob.norm == NormKind::Two) {
    throw Error(ErrorCode::OutOfScope,
                "the Euclidean-norm program is a cone program, not an LP; use value or policy iteration");
  }
  const std::size_t n = prob.n();
  const std::size_t m = prob.m();
  const bool with_t = prob.norm == NormKind::Inf;  // dual is sum-abs
  const std::size_t g = n;
  const std::size_t t0 = n + 1;
  const std::size_t nv = with_t ? n + 1 + m : n + 1;

  LinearProgram lp;
  lp.objective.assign(nv, 0.0);
  std::fill_n(lp.objective.begin(), n, 1.0);
  lp.A_eq = Matrix(0, nv);

  const std::size_t rows = n + 2 * m + (with_t ? 1 : 0);
  lp.A_le = Matrix(rows, nv);
  lp.b_le.assign(rows, 0.0);
  // (I - A')p + N'g <= s
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lp.A_le(i, j) = (i == j ? 1.0 : 0.0) - prob.A(j, i);
    lp.A_le(i, g) = prob.N[i];
    lp.b_le[i] = prob.s[i];
  }
  // +-(r_k + b_k'p) <= g (max-abs dual) or <= t_k (sum-abs dual)
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t up = n + 2 * k;
    const std::size_t dn = up + 1;
    for (std::size_t j = 0; j < n; ++j) {
      lp.A_le(up, j) = prob.B(j, k);
      lp.A_le(dn, j) = -prob.B(j, k);
    }
    const std::size_t bound_col = with_t ? t0 + k : g;
    lp.A_le(up, bound_col) = -1.0;
    lp.A_le(dn, bound_col) = -1.0;
    lp.b_le[up] = -prob.r[k];
    lp.b_le[dn] = prob.r[k];
  }
  if (with_t) {
    const std::size_t last = rows - 1;
    for (std::size_t k = 0; k < m; ++k) lp.A_le(last, t0 + k) = 1.0;
    lp.A_le(last, g) = -1.0;
  }
  lp.free_vars.assign(nv, false);
  for (std::size_t j = 0; j < n; ++j) lp.var_names.push_back("p" + std::to_string(j + 1));
  lp.var_names.push_back("g");
  if (with_t)
    for (std::size_t k = 0; k < m; ++k) lp.var_names.push_back("t" + std::to_string(k + 1));
  return lp;
}

SolveResult solve_via_lp(const Problem& prob, const SimplexOptions& opts) {
  const LinearProgram lp = std::visit(
      [](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, AbsProblem>) return build_abs_lp(q);
        else return build_norm_program(q);
      },
      prob);
  const LpOutcome outcome = simplex_solve(lp, opts);

  SolveResult res;
  res.method = Method::LP;
  res.lp_status = outcome.status;
  res.iterations = outcome.pivots;
  if (outcome.status != LpStatus::Optimal) {
    res.status = SolveStatus::Diverged;
    return res;
  }
  const std::size_t n = state_dim(prob);
  Vector p(outcome.x->begin(), outcome.x->begin() + static_cast<std::ptrdiff_t>(n));
  // vertex values may carry -0 or tiny negative rounding
  for (double& v : p) v = std::max(v, 0.0);
  const double cert = max_abs_diff(apply_bellman(p, prob), p);
  if (cert > kLpResidualTol) {
    throw Error(ErrorCode::ResidualCheck,
                "LP optimum fails the Bellman residual check: " + std::to_string(cert));
  }
  res.status = SolveStatus::Converged;
  res.certificate = cert;
  res.policy = certify_policy(prob, greedy(p, prob));
  res.p_star = std::move(p);
  return res;
}

void dump_lp(std::ostream& os, const LinearProgram& lp) {
  auto name = [&](std::size_t j) {
    return j < lp.var_names.size() ? lp.var_names[j] : "x" + std::to_string(j + 1);
  };
  auto terms = [&](std::span<const double> coeffs) {
    std::string s;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      if (coeffs[j] == 0.0) continue;
      if (!s.empty()) s += coeffs[j] < 0 ? " - " : " + ";
      else if (coeffs[j] < 0) s += "-";
      s += std::to_string(std::fabs(coeffs[j])) + " " + name(j);
    }
    return s.empty() ? std::string("0") : s;
  };
  os << "maximize " << terms(lp.objective) << "\nsubject to\n";
  for (std::size_t i = 0; i < lp.b_eq.size(); ++i)
    os << "  eq" << i + 1 << ": " << terms(lp.A_eq.row(i)) << " = " << lp.b_eq[i] << "\n";
  for (std::size_t i = 0; i < lp.b_le.size(); ++i)
    os << "  le" << i + 1 << ": " << terms(lp.A_le.row(i)) << " <= " << lp.b_le[i] << "\n";
  os << "bounds\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const bool free = !lp.free_vars.empty() && lp.free_vars[j];
    os << "  " << name(j) << (free ? " free" : " >= 0") << "\n";
  }
}

}  // namespace poslin
