#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "verdoorn/numerics.hpp"
#include "verdoorn/rng.hpp"
#include "verdoorn/test_result.hpp"

using namespace verdoorn;

namespace {

// Independent oracle: solve the normal equations (X'X) b = X'y in extended
// precision by Gaussian elimination with partial pivoting.
std::vector<double> normal_equations_oracle(const Matrix& x, const std::vector<double>& y) {
  const std::size_t n = x.rows(), k = x.cols();
  std::vector<std::vector<long double>> a(k, std::vector<long double>(k + 1, 0.0L));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      long double s = 0.0L;
      for (std::size_t r = 0; r < n; ++r)
        s += static_cast<long double>(x(r, i)) * static_cast<long double>(x(r, j));
      a[i][j] = s;
    }
    long double s = 0.0L;
    for (std::size_t r = 0; r < n; ++r)
      s += static_cast<long double>(x(r, i)) * static_cast<long double>(y[r]);
    a[i][k] = s;
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::fabs(static_cast<double>(a[r][col])) >
          std::fabs(static_cast<double>(a[pivot][col])))
        pivot = r;
    std::swap(a[col], a[pivot]);
    for (std::size_t r = col + 1; r < k; ++r) {
      const long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> beta(k);
  for (std::size_t row = k; row-- > 0;) {
    long double s = a[row][k];
    for (std::size_t c = row + 1; c < k; ++c) s -= a[row][c] * beta[c];
    beta[row] = static_cast<double>(s / a[row][row]);
  }
  return beta;
}

double bisect_normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf_normal(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("least squares recovers an exact line") {
  Matrix x = Matrix::from_rows({{1, 0}, {1, 1}, {1, 2}});
  auto fit = solve_least_squares(x, {0, 1, 2});
  CHECK(fit.coefficients[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.coefficients[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.residual_sum_squares == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.rank == 2);
}

TEST_CASE("least squares with a constant response") {
  Matrix x = Matrix::from_rows({{1, 0}, {1, 1}, {1, 2}});
  auto fit = solve_least_squares(x, {1, 1, 1});
  CHECK(fit.coefficients[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(fit.coefficients[1] == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("least squares matches the extended-precision normal equations") {
  Rng rng(20240915);
  Matrix x(50, 3);
  std::vector<double> y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    x(i, 2) = rng.normal(0.0, 3.0);
    y[i] = rng.normal();
  }
  auto fit = solve_least_squares(x, y);
  auto oracle = normal_equations_oracle(x, y);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(std::fabs(fit.coefficients[j] - oracle[j]) < 1e-8);
}

TEST_CASE("least squares invariants: residual orthogonality, rss, symmetry") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 12 + rep;
    Matrix x(n, 3);
    std::vector<double> y(n);
    double ynorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      x(i, 1) = rng.normal();
      x(i, 2) = rng.uniform(-2.0, 2.0);
      y[i] = rng.normal(0.0, 2.0);
      ynorm += y[i] * y[i];
    }
    ynorm = std::sqrt(ynorm);
    auto fit = solve_least_squares(x, y);

    for (std::size_t j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += fit.residuals[i] * x(i, j);
      CHECK(std::fabs(dot) < 1e-8 * ynorm);
    }

    double rss = 0.0;
    for (double r : fit.residuals) rss += r * r;
    CHECK(fit.residual_sum_squares == doctest::Approx(rss).epsilon(1e-9));

    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        CHECK(std::fabs(fit.xtx_inverse(i, j) - fit.xtx_inverse(j, i)) < 1e-10);
  }
}

TEST_CASE("rank deficiency raises a descriptive error") {
  Matrix x = Matrix::from_rows({{1, 2, 4}, {1, 2, 4}, {1, 2, 4}, {1, 2, 4}});
  CHECK_THROWS_AS(solve_least_squares(x, {1, 2, 3, 4}), RankDeficiencyError);
  try {
    solve_least_squares(x, {1, 2, 3, 4});
  } catch (const RankDeficiencyError& e) {
    CHECK(e.columns() == 3);
    CHECK(e.rank() < 3);
  }
}

TEST_CASE("normal cdf and quantile") {
  CHECK(cdf_normal(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::fabs(quantile_normal(0.975) - 1.959964) < 1e-5);
  CHECK(std::fabs(quantile_normal(0.975) - bisect_normal_quantile(0.975)) < 1e-9);
  CHECK(cdf_normal(quantile_normal(0.3)) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK_THROWS_AS(quantile_normal(0.0), DomainError);
  CHECK_THROWS_AS(quantile_normal(1.0), DomainError);
}

TEST_CASE("quantile/cdf roundtrip is the identity on [-6, 6]") {
  // Near +6 the probability sits ~1e-9 below 1.0, where doubles are spaced
  // 1.1e-16 apart; that quantization alone moves the recovered x by up to
  // ulp(1)/2 / pdf(x). The bound below is 1e-9 wherever that floor permits.
  for (int i = 0; i <= 120; ++i) {
    const double x = -6.0 + i * 0.1;
    const double pdf = std::exp(-0.5 * x * x) / 2.5066282746310005;
    const double quantization = 2.0 * 5.551115123125783e-17 / pdf;
    const double bound = std::max(1e-9, quantization);
    CHECK(std::fabs(quantile_normal(cdf_normal(x)) - x) < bound);
  }
}

TEST_CASE("chi-squared, t and F anchor values") {
  CHECK(cdf_chi_squared(0.0, 5) == 0.0);
  CHECK(cdf_student_t(0.0, 7.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cdf_f(1.0, 10, 10) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS(cdf_chi_squared(1.0, 0), DomainError);
  CHECK_THROWS_AS(cdf_student_t(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(cdf_f(1.0, 0, 3), DomainError);
}

TEST_CASE("cdfs are monotone on a sampled grid") {
  double prev_n = -1.0, prev_c = -1.0, prev_t = -1.0, prev_f = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double xn = -8.0 + 16.0 * i / 999.0;
    const double xp = 40.0 * i / 999.0;
    const double n = cdf_normal(xn);
    const double c = cdf_chi_squared(xp, 6);
    const double t = cdf_student_t(xn, 11.0);
    const double f = cdf_f(xp, 4, 17);
    CHECK(n >= prev_n);
    CHECK(c >= prev_c);
    CHECK(t >= prev_t);
    CHECK(f >= prev_f);
    prev_n = n;
    prev_c = c;
    prev_t = t;
    prev_f = f;
  }
}

TEST_CASE("student t converges to the normal for huge df") {
  for (int i = 0; i <= 100; ++i) {
    const double x = -5.0 + 0.1 * i;
    CHECK(std::fabs(cdf_student_t(x, 1e6) - cdf_normal(x)) <= 1e-6);
  }
}

TEST_CASE("symmetric eigen and pseudo-inverse") {
  Matrix a = Matrix::from_rows({{4, 1, 0}, {1, 3, 1}, {0, 1, 2}});
  auto eig = eigen_symmetric(a);
  // Reconstruct and compare.
  Matrix recon(3, 3, 0.0);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        recon(i, j) += eig.values[k] * eig.vectors(i, k) * eig.vectors(j, k);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(recon(i, j) == doctest::Approx(a(i, j)).epsilon(1e-10));

  bool deficient = true;
  Matrix inv = pseudo_inverse_symmetric(a, &deficient);
  CHECK_FALSE(deficient);
  Matrix prod = a * inv;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));

  // Singular case: rank-1 outer product.
  Matrix s = Matrix::from_rows({{1, 2}, {2, 4}});
  Matrix sp = pseudo_inverse_symmetric(s, &deficient);
  CHECK(deficient);
  // Moore-Penrose identity A A+ A = A.
  Matrix back = s * sp * s;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(back(i, j) == doctest::Approx(s(i, j)).epsilon(1e-9));
}

TEST_CASE("tail probabilities match their cdfs") {
  CHECK(tail_probability(Distribution::chi_squared(2), Tail::Upper, 3.0) ==
        doctest::Approx(1.0 - cdf_chi_squared(3.0, 2)).epsilon(1e-12));
  CHECK(tail_probability(Distribution::normal(), Tail::Lower, -1.5) ==
        doctest::Approx(cdf_normal(-1.5)).epsilon(1e-12));
  CHECK(tail_probability(Distribution::student_t(9), Tail::TwoSided, 2.0) ==
        doctest::Approx(2.0 * (1.0 - cdf_student_t(2.0, 9.0))).epsilon(1e-12));
  auto r = make_test_result("w", 5.0, Distribution::chi_squared(1), Tail::Upper, "none");
  CHECK(r.significant_5pct);
  CHECK(r.p_value == doctest::Approx(1.0 - cdf_chi_squared(5.0, 1)).epsilon(1e-12));
}

TEST_CASE("seed splitting has no collisions across a study") {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(100000);
  for (std::uint64_t r = 0; r < 100000; ++r) seeds.push_back(replication_seed(99, r));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}
