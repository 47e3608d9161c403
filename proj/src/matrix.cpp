#include "poslin/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "poslin/error.hpp"

namespace poslin {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::NonFinite: return "non-finite";
    case ErrorCode::UnknownNorm: return "unknown-norm";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Unstable: return "unstable";
    case ErrorCode::Singular: return "singular";
    case ErrorCode::NoStabilizingPolicy: return "no-stabilizing-policy";
    case ErrorCode::InvalidSeed: return "invalid-seed";
    case ErrorCode::OutOfScope: return "out-of-scope";
    case ErrorCode::NotConverged: return "not-converged";
    case ErrorCode::ResidualCheck: return "residual-check";
    case ErrorCode::InternalConsistency: return "internal-consistency";
  }
  return "unknown";
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()) + " differ");
  }
}

void require_same_length(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch, std::string(op) + ": lengths " +
                                                  std::to_string(a) + " and " +
                                                  std::to_string(b) + " differ");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix id(n, n);
  for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
  return id;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix out;
  out.rows_ = rows.size();
  out.cols_ = rows.empty() ? 0 : rows.front().size();
  out.data_.reserve(out.rows_ * out.cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != out.cols_) {
      throw Error(ErrorCode::DimensionMismatch,
                  "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                      " entries, expected " + std::to_string(out.cols_));
    }
    out.data_.insert(out.data_.end(), rows[i].begin(), rows[i].end());
  }
  return out;
}

Matrix Matrix::row_vector(const Vector& v) {
  Matrix out(1, v.size());
  std::copy(v.begin(), v.end(), out.data_.begin());
  return out;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const { return poslin::all_finite(data_); }

double Matrix::min_entry() const {
  double lo = std::numeric_limits<double>::infinity();
  for (double x : data_) lo = std::min(lo, x);
  return lo;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix add");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix subtract");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix product: inner dimensions differ");
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix operator*(double k, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = k * a(i, j);
  return c;
}

Vector multiply(const Matrix& m, std::span<const double> v) {
  require_same_length(m.cols(), v.size(), "matrix-vector product");
  Vector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
  return out;
}

Vector multiply_transposed(const Matrix& m, std::span<const double> v) {
  require_same_length(m.rows(), v.size(), "transposed matrix-vector product");
  Vector out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += vi * r[j];
  }
  return out;
}

Matrix abs(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = std::fabs(m(i, j));
  return out;
}

Vector abs(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::fabs(x); });
  return out;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "vector add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "vector subtract");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scale(double k, std::span<const double> v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = k * v[i];
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "dot product");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double max_abs(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc = std::max(acc, std::fabs(x));
  return acc;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "max_abs_diff");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::fabs(a[i] - b[i]));
  return acc;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  return max_abs_diff(a.data(), b.data());
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vector solve_linear(Matrix m, Vector b, double pivot_tol) {
  const std::size_t n = m.rows();
  if (!m.is_square() || b.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "solve_linear: system is not square");
  }
  const double scale_ref = std::max(max_abs(m.data()), std::numeric_limits<double>::min());

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(piv, k))) piv = i;
    if (std::fabs(m(piv, k)) <= pivot_tol * scale_ref) {
      throw Error(ErrorCode::Singular,
                  "solve_linear: pivot " + std::to_string(k) + " vanishes");
    }
    if (piv != k) {
      std::swap_ranges(m.row(k).begin(), m.row(k).end(), m.row(piv).begin());
      std::swap(b[k], b[piv]);
    }
    const double inv = 1.0 / m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) * inv;
      if (f == 0.0) continue;
      m(i, k) = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }

  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= m(ii, j) * x[j];
    x[ii] = acc / m(ii, ii);
  }
  return x;
}

}  // namespace poslin
