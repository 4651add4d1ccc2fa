#include "verdoorn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace verdoorn {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DomainError("Matrix::from_rows: ragged row lengths");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw DomainError("Matrix multiply: inner dimensions differ");
  Matrix out(rows_, rhs.cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

std::vector<double> Matrix::operator*(const std::vector<double>& v) const {
  if (cols_ != v.size()) throw DomainError("Matrix-vector multiply: dimension mismatch");
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DomainError("Matrix add: shape mismatch");
  Matrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DomainError("Matrix subtract: shape mismatch");
  Matrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
  return out;
}

void Matrix::ensure_finite(const char* context) const {
  for (double v : data_)
    if (!std::isfinite(v))
      throw DomainError(std::string(context) + ": non-finite matrix entry");
}

RankDeficiencyError::RankDeficiencyError(std::size_t rank, std::size_t columns)
    : Error("rank-deficient design matrix: rank " + std::to_string(rank) + " of " +
            std::to_string(columns) + " columns"),
      rank_(rank),
      columns_(columns) {}

LeastSquaresFit solve_least_squares(const Matrix& x, const std::vector<double>& y) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  if (k == 0) throw DomainError("solve_least_squares: zero columns");
  if (n < k) throw DomainError("solve_least_squares: fewer rows than columns");
  if (y.size() != n) throw DomainError("solve_least_squares: y length differs from row count");
  x.ensure_finite("solve_least_squares");
  for (double v : y)
    if (!std::isfinite(v)) throw DomainError("solve_least_squares: non-finite response");

  // Householder QR applied in place; qty accumulates Q'y.
  Matrix a = x;
  std::vector<double> qty = y;
  std::vector<double> diag(k, 0.0);

  for (std::size_t j = 0; j < k; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += a(i, j) * a(i, j);
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      diag[j] = 0.0;
      continue;
    }
    const double alpha = a(j, j) > 0.0 ? -norm : norm;
    // Reflector v stored in column j below the diagonal, v_j in place of a_jj.
    a(j, j) -= alpha;
    double vtv = 0.0;
    for (std::size_t i = j; i < n; ++i) vtv += a(i, j) * a(i, j);
    if (vtv > 0.0) {
      for (std::size_t t = j + 1; t < k; ++t) {
        double s = 0.0;
        for (std::size_t i = j; i < n; ++i) s += a(i, j) * a(i, t);
        s *= 2.0 / vtv;
        for (std::size_t i = j; i < n; ++i) a(i, t) -= s * a(i, j);
      }
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += a(i, j) * qty[i];
      s *= 2.0 / vtv;
      for (std::size_t i = j; i < n; ++i) qty[i] -= s * a(i, j);
    }
    diag[j] = alpha;
  }

  double max_diag = 0.0;
  for (double d : diag) max_diag = std::max(max_diag, std::fabs(d));
  const double tol = 1e-10 * max_diag;
  std::size_t rank = 0;
  for (double d : diag)
    if (std::fabs(d) > tol) ++rank;
  if (rank < k) throw RankDeficiencyError(rank, k);

  // Back substitution on R (strict upper part of a plus diag).
  std::vector<double> beta(k, 0.0);
  for (std::size_t jj = k; jj-- > 0;) {
    double s = qty[jj];
    for (std::size_t t = jj + 1; t < k; ++t) s -= a(jj, t) * beta[t];
    beta[jj] = s / diag[jj];
  }

  LeastSquaresFit fit;
  fit.coefficients = beta;
  fit.rank = rank;
  fit.residuals.resize(n);
  std::vector<double> fitted = x * beta;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - fitted[i];
    rss += fit.residuals[i] * fit.residuals[i];
  }
  fit.residual_sum_squares = rss;

  // (X'X)^-1 = Rinv Rinv'; computed triangle-first so the result is exactly
  // symmetric.
  Matrix rinv(k, k, 0.0);
  for (std::size_t col = 0; col < k; ++col) {
    for (std::size_t row = col + 1; row-- > 0;) {
      double s = row == col ? 1.0 : 0.0;
      for (std::size_t t = row + 1; t <= col; ++t) s -= a(row, t) * rinv(t, col);
      rinv(row, col) = s / diag[row];
    }
  }
  Matrix xtx_inv(k, k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      double s = 0.0;
      for (std::size_t t = std::max(i, j); t < k; ++t) s += rinv(i, t) * rinv(j, t);
      xtx_inv(i, j) = s;
      xtx_inv(j, i) = s;
    }
  fit.xtx_inverse = xtx_inv;
  return fit;
}

SymmetricEigen eigen_symmetric(const Matrix& input) {
  if (input.rows() != input.cols()) throw DomainError("eigen_symmetric: matrix not square");
  input.ensure_finite("eigen_symmetric");
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);

  double frob = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
  frob = std::sqrt(frob);
  const double stop = 1e-14 * (frob > 0.0 ? frob : 1.0);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= stop) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  out.vectors = v;
  return out;
}

Matrix pseudo_inverse_symmetric(const Matrix& a, bool* rank_deficient,
                                double relative_tolerance) {
  SymmetricEigen eig = eigen_symmetric(a);
  const std::size_t n = a.rows();
  double max_abs = 0.0;
  for (double v : eig.values) max_abs = std::max(max_abs, std::fabs(v));
  const double tol = relative_tolerance * (max_abs > 0.0 ? max_abs : 1.0);

  bool dropped = false;
  Matrix out(n, n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::fabs(eig.values[k]) <= tol) {
      dropped = true;
      continue;
    }
    const double inv = 1.0 / eig.values[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += inv * eig.vectors(i, k) * eig.vectors(j, k);
  }
  if (rank_deficient) *rank_deficient = dropped;
  return out;
}

}  // namespace verdoorn
