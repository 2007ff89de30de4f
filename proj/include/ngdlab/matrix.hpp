#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "ngdlab/errors.hpp"

namespace ngdlab {

/// Dense row-major matrix of doubles. This is the only numeric container
/// in the library: everything stays dense and 64-bit by design, so results
/// are easy to reproduce and cross-check.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);
  static Matrix ones(std::size_t rows, std::size_t cols);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
  const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool all_finite() const;
  double max_abs() const;
  double trace() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);

/// Elementwise product; shapes must match exactly.
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Column-wise Khatri-Rao product: column c of the result is
/// kron(a.col(c), b.col(c)). a is p x m, b is q x m, result is (p*q) x m.
Matrix khatri_rao_cols(const Matrix& a, const Matrix& b);

/// Kronecker product of two column vectors (p x 1 and q x 1 -> pq x 1).
Matrix kron(const Matrix& u, const Matrix& v);

/// Returns s + value * I. s must be square.
Matrix add_diagonal(const Matrix& s, double value);

/// Returns a * factor.
Matrix scaled(const Matrix& a, double factor);

/// Returns a + b; shapes must match.
Matrix add(const Matrix& a, const Matrix& b);

/// Returns a - b; shapes must match.
Matrix sub(const Matrix& a, const Matrix& b);

/// Solves S X = B for symmetric positive definite S via Cholesky.
/// If factorization hits a non-positive pivot the solver retries with a
/// small diagonal jitter (1e-10 * trace(S)/n, doubled per attempt, at most
/// three retries) before giving up with SingularError.
Matrix cholesky_solve(const Matrix& s, const Matrix& b);

/// Explicit inverse of a symmetric positive definite matrix. Refuses
/// matrices whose Cholesky-based condition estimate exceeds 1e14.
Matrix spd_inverse(const Matrix& s);

}  // namespace ngdlab
