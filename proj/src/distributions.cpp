#include <cmath>
#include <string>

#include "verdoorn/numerics.hpp"
#include "verdoorn/test_result.hpp"

namespace verdoorn {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kTiny = 1e-300;

// Lower incomplete gamma by series expansion, valid for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, valid for x >= a+1.
double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the regularized incomplete beta (Lentz).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 200000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 3e-16) break;
  }
  return h;
}

}  // namespace

double cdf_normal(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double quantile_normal(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("quantile_normal: p must lie strictly inside (0, 1)");

  // Acklam's rational approximation, then one Halley correction step against
  // cdf_normal, which leaves the roundtrip error near machine precision.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  for (int step = 0; step < 2; ++step) {
    const double e = cdf_normal(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0) throw DomainError("regularized_gamma_p: shape must be positive");
  if (x < 0.0) throw DomainError("regularized_gamma_p: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw DomainError("regularized_beta: shapes must be positive");
  if (x < 0.0 || x > 1.0) throw DomainError("regularized_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_continued_fraction(a, b, x) / a;
  return 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double cdf_chi_squared(double x, int df) {
  if (df <= 0) throw DomainError("cdf_chi_squared: df must be positive");
  if (x < 0.0) throw DomainError("cdf_chi_squared: x must be non-negative");
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double cdf_student_t(double x, double df) {
  if (df <= 0.0) throw DomainError("cdf_student_t: df must be positive");
  if (x == 0.0) return 0.5;
  const double z = df / (df + x * x);
  const double half_tail = 0.5 * regularized_beta(0.5 * df, 0.5, z);
  return x > 0.0 ? 1.0 - half_tail : half_tail;
}

double cdf_f(double x, int df1, int df2) {
  if (df1 <= 0 || df2 <= 0) throw DomainError("cdf_f: degrees of freedom must be positive");
  if (x < 0.0) throw DomainError("cdf_f: x must be non-negative");
  if (x == 0.0) return 0.0;
  const double d1 = df1, d2 = df2;
  return regularized_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

std::string Distribution::label() const {
  switch (kind) {
    case Kind::F:
      return "F(" + std::to_string(static_cast<long long>(df1)) + "," +
             std::to_string(static_cast<long long>(df2)) + ")";
    case Kind::ChiSquared:
      return "chi2(" + std::to_string(static_cast<long long>(df1)) + ")";
    case Kind::Normal:
      return "N(0,1)";
    case Kind::StudentT:
      return "t(" + std::to_string(static_cast<long long>(df1)) + ")";
  }
  return "?";
}

double tail_probability(const Distribution& dist, Tail tail, double statistic) {
  double lower = 0.0;
  switch (dist.kind) {
    case Distribution::Kind::F:
      lower = cdf_f(statistic < 0.0 ? 0.0 : statistic, static_cast<int>(dist.df1),
                    static_cast<int>(dist.df2));
      break;
    case Distribution::Kind::ChiSquared:
      lower = cdf_chi_squared(statistic < 0.0 ? 0.0 : statistic, static_cast<int>(dist.df1));
      break;
    case Distribution::Kind::Normal:
      lower = cdf_normal(statistic);
      break;
    case Distribution::Kind::StudentT:
      lower = cdf_student_t(statistic, dist.df1);
      break;
  }
  switch (tail) {
    case Tail::Lower:
      return lower;
    case Tail::Upper:
      return 1.0 - lower;
    case Tail::TwoSided: {
      const double one_sided = statistic >= 0.0 ? 1.0 - lower : lower;
      return std::min(1.0, 2.0 * one_sided);
    }
  }
  return 1.0;
}

TestResult make_test_result(std::string name, double statistic, Distribution dist,
                            Tail tail, std::string null_hypothesis) {
  TestResult r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.distribution = dist;
  r.tail = tail;
  r.p_value = tail_probability(dist, tail, statistic);
  r.null_hypothesis = std::move(null_hypothesis);
  r.significant_5pct = r.p_value < 0.05;
  return r;
}

}  // namespace verdoorn
