#include "poslin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "poslin/error.hpp"

namespace poslin {

namespace {

// Entries down to -kNegativeSlack * max|M| are treated as rounding noise and
// clamped to zero; anything more negative is rejected.
constexpr double kNegativeSlack = 1e-12;
constexpr double kPolishTol = 1e-12;

Matrix checked_nonnegative(const Matrix& m) {
  if (!m.is_square() || m.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "spectral: matrix must be square and non-empty");
  }
  if (!m.all_finite()) throw Error(ErrorCode::NonFinite, "spectral: non-finite entries");
  const double slack = kNegativeSlack * std::max(1.0, max_abs(m.data()));
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (out(i, j) < -slack) {
        throw Error(ErrorCode::InvalidArgument,
                    "spectral: entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") = " + std::to_string(out(i, j)) + " is negative");
      }
      out(i, j) = std::max(out(i, j), 0.0);
    }
  }
  return out;
}

double max_row_sum(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (double x : m.row(i)) acc += x;
    best = std::max(best, acc);
  }
  return best;
}

enum class Verdict { Undecided, Stable, Unstable };

struct PowerState {
  SpectralCertificate cert;
  bool converged = false;
  Verdict verdict = Verdict::Undecided;
};

// When `threshold` is set the loop also stops once the Collatz-Wielandt
// bracket lies entirely on one side of it.
PowerState power_iterate(const Matrix& m, const SpectralOptions& opts,
                         std::optional<double> threshold) {
  const std::size_t n = m.rows();
  PowerState st;
  SpectralCertificate& c = st.cert;
  c.eigvec.assign(n, 1.0);

  const double row_sum = max_row_sum(m);
  if (row_sum == 0.0) {
    c.rho = c.rho_lower = c.rho_upper = 0.0;
    c.residual = 0.0;
    st.converged = true;
    return st;
  }
  const double sigma = opts.shift_fraction * row_sum;

  Vector& x = c.eigvec;
  Vector y(n);
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    y = multiply(m, x);

    double lower = std::numeric_limits<double>::infinity();
    double upper = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] > 0.0) {
        const double q = y[i] / x[i];
        lower = std::min(lower, q);
        upper = std::max(upper, q);
      } else {
        positive = false;
      }
    }
    // The ratio bound is only an upper bound for a strictly positive x.
    if (!positive) upper = row_sum;
    c.rho_lower = std::max(c.rho_lower, lower);
    c.rho_upper = (it == 1) ? upper : std::min(c.rho_upper, upper);

    // x is normalised to ||x||_inf = 1, so this is the shifted dominant value.
    double zmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) zmax = std::max(zmax, y[i] + sigma * x[i]);
    const double rho = zmax - sigma;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::fabs(y[i] - rho * x[i]));

    c.rho = rho;
    c.residual = res;
    c.iterations = it;

    if (threshold) {
      if (c.rho_lower >= *threshold) {
        st.verdict = Verdict::Unstable;
        return st;
      }
      if (c.rho_upper < *threshold) {
        st.verdict = Verdict::Stable;
        return st;
      }
    }
    if (res <= opts.tol) {
      st.converged = true;
      return st;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = (y[i] + sigma * x[i]) / zmax;
  }
  return st;
}

// rho(M) < c  iff  (cI - M) y = 1 has a strictly positive solution (M >= 0).
bool below_by_m_matrix_test(const Matrix& m, double c) {
  const std::size_t n = m.rows();
  Matrix a = -1.0 * m;
  for (std::size_t i = 0; i < n; ++i) a(i, i) += c;
  try {
    const Vector y = solve_linear(a, Vector(n, 1.0), 0.0);
    return std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0 && std::isfinite(v); });
  } catch (const Error&) {
    return false;
  }
}

// A small residual only pins a defective Perron root to about sqrt(tol), so
// the estimate is refined by bisection on the M-matrix test.
double polish(const Matrix& m, const SpectralCertificate& c) {
  const double rho = c.rho;
  const double step = kPolishTol * std::max(1.0, rho);
  const bool below_lo = rho - step > 0.0 && below_by_m_matrix_test(m, rho - step);
  if (!below_lo && below_by_m_matrix_test(m, rho + step)) return rho;

  // invariant: lo <= rho(M) < hi
  double lo = 0.0;
  double hi = 0.0;
  if (below_lo) {
    hi = rho - step;
    lo = std::clamp(c.rho_lower, 0.0, hi);
  } else {
    lo = rho + step;
    hi = std::max(c.rho_upper, lo) + step;
    while (!below_by_m_matrix_test(m, hi)) hi = 2.0 * hi;
  }
  for (int i = 0; i < 200 && hi - lo > step; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (below_by_m_matrix_test(m, mid)) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SpectralCertificate spectral_radius(const Matrix& m, const SpectralOptions& opts) {
  const Matrix mm = checked_nonnegative(m);
  PowerState st = power_iterate(mm, opts, std::nullopt);
  if (!st.converged) {
    throw Error(ErrorCode::NotConverged,
                "spectral_radius: residual " + std::to_string(st.cert.residual) +
                    " after " + std::to_string(opts.max_iter) + " iterations");
  }
  st.cert.rho = std::max(st.cert.rho, 0.0);
  if (st.cert.rho_lower <= st.cert.rho_upper) {
    st.cert.rho = std::clamp(st.cert.rho, st.cert.rho_lower, st.cert.rho_upper);
  }
  st.cert.rho = polish(mm, st.cert);
  st.cert.stable = st.cert.rho < 1.0 - opts.margin;
  return st.cert;
}

bool is_stable(const Matrix& m, double margin) {
  const Matrix mm = checked_nonnegative(m);
  const double threshold = 1.0 - margin;
  SpectralOptions opts;
  opts.margin = margin;
  const PowerState st = power_iterate(mm, opts, threshold);
  switch (st.verdict) {
    case Verdict::Stable: return true;
    case Verdict::Unstable: return false;
    case Verdict::Undecided: break;
  }
  if (st.converged) return st.cert.rho < threshold;
  return below_by_m_matrix_test(mm, threshold);
}

Vector neumann_sum(std::span<const double> v, const Matrix& m, std::size_t len) {
  if (!m.is_square() || m.rows() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch, "neumann_sum: dimensions differ");
  }
  Vector acc(v.size(), 0.0);
  if (len == 0) return acc;
  Vector term(v.begin(), v.end());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += term[j];
    if (i + 1 < len) term = multiply_transposed(m, term);
  }
  return acc;
}

}  // namespace poslin
