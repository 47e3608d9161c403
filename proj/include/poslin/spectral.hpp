#pragma once

#include <cstddef>

#include "poslin/matrix.hpp"

namespace poslin {

inline constexpr double kDefaultStabilityMargin = 1e-9;

struct SpectralOptions {
  double tol = 1e-12;
  std::size_t max_iter = 50000;
  /// Stability threshold: stable iff rho < 1 - margin.
  double margin = kDefaultStabilityMargin;
  /// Additive shift as a fraction of the largest row sum.
  double shift_fraction = 1e-3;
};

/// Perron root estimate of a nonnegative matrix.
///
/// `rho_lower`/`rho_upper` are Collatz-Wielandt bounds from the final
/// positive iterate: min_i (Mx)_i/x_i <= rho(M) <= max_i (Mx)_i/x_i. They
/// hold for any nonnegative M, reducible or not.
struct SpectralCertificate {
  double rho = 0.0;
  Vector eigvec;  // >= 0, ||eigvec||_inf = 1
  double residual = 0.0;  // ||M x - rho x||_inf / ||x||_inf
  bool stable = false;
  double rho_lower = 0.0;
  double rho_upper = 0.0;
  std::size_t iterations = 0;
};

/// Shifted power iteration on M + sigma I from the all-ones vector.
/// Throws Error(InvalidArgument) for non-square or negative input and
/// Error(NotConverged) when the residual stays above `tol` after `max_iter`.
SpectralCertificate spectral_radius(const Matrix& m, const SpectralOptions& opts = {});

/// rho(M) < 1 - margin for M >= 0. Decides as soon as the Collatz-Wielandt
/// bracket excludes the threshold, so it does not need full convergence.
bool is_stable(const Matrix& m, double margin = kDefaultStabilityMargin);

/// v' sum_{i=0}^{len-1} M^i, by repeated multiply-accumulate.
Vector neumann_sum(std::span<const double> v, const Matrix& m, std::size_t len);

}  // namespace poslin
