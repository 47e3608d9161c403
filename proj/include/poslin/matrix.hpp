#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace poslin {

using Vector = std::vector<double>;

/// Dense row-major matrix. Sized for desk-scale problems (n, m up to a few
/// hundred); no expression templates, no sparse storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  /// 1 x n matrix holding `v` as its only row.
  static Matrix row_vector(const Vector& v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;

  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  bool all_finite() const;
  /// Smallest entry; +inf for an empty matrix.
  double min_entry() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double k, const Matrix& a);

/// M v
Vector multiply(const Matrix& m, std::span<const double> v);
/// M' v, equivalently the row vector v' M.
Vector multiply_transposed(const Matrix& m, std::span<const double> v);

Matrix abs(const Matrix& m);
Vector abs(std::span<const double> v);

Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scale(double k, std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

double max_abs(std::span<const double> v);
/// max_i |a_i - b_i|
double max_abs_diff(std::span<const double> a, std::span<const double> b);
/// max |M_ij - N_ij|
double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(std::span<const double> v);

/// Solves M x = b by Gaussian elimination with partial pivoting. Throws
/// Error(Singular) when a pivot falls below `pivot_tol` times the largest
/// absolute entry of M.
Vector solve_linear(Matrix m, Vector b, double pivot_tol = 1e-14);

}  // namespace poslin
