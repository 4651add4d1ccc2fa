#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "verdoorn/error.hpp"

namespace verdoorn {

// Dense row-major matrix of finite doubles. Small: every design matrix in
// this library has at most a few dozen columns.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transposed() const;
  Matrix operator*(const Matrix& rhs) const;
  std::vector<double> operator*(const std::vector<double>& v) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;

  // Throws DomainError if any entry is NaN or infinite.
  void ensure_finite(const char* context) const;

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(std::size_t rank, std::size_t columns);
  std::size_t rank() const { return rank_; }
  std::size_t columns() const { return columns_; }

 private:
  std::size_t rank_;
  std::size_t columns_;
};

struct LeastSquaresFit {
  std::vector<double> coefficients;
  std::vector<double> residuals;
  double residual_sum_squares = 0.0;
  Matrix xtx_inverse;  // (X'X)^-1, symmetric by construction
  std::size_t rank = 0;
};

// Minimizes ||y - X b|| by Householder QR. Never forms the normal equations.
// Diagonal entries of R below 1e-10 times the largest are treated as zero;
// a deficient rank raises RankDeficiencyError.
LeastSquaresFit solve_least_squares(const Matrix& x, const std::vector<double>& y);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// a == vectors * diag(values) * vectors^T with orthonormal columns.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
};
SymmetricEigen eigen_symmetric(const Matrix& a);

// Moore-Penrose inverse of a symmetric matrix. Eigenvalues below
// relative_tolerance times the largest magnitude are dropped; when any are,
// *rank_deficient is set.
Matrix pseudo_inverse_symmetric(const Matrix& a, bool* rank_deficient = nullptr,
                                double relative_tolerance = 1e-12);

// --- distribution kernels ---------------------------------------------------

double cdf_normal(double x);
double quantile_normal(double p);  // throws DomainError unless 0 < p < 1
double cdf_chi_squared(double x, int df);
double cdf_student_t(double x, double df);
double cdf_f(double x, int df1, int df2);

// Regularized incomplete gamma P(a,x) and beta I_x(a,b); exposed so tests can
// probe the kernels directly.
double regularized_gamma_p(double a, double x);
double regularized_beta(double a, double b, double x);

}  // namespace verdoorn
