#include "verdoorn/unit_root.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace verdoorn {

namespace {

struct PpRegression {
  double t_statistic = 0.0;  // OLS t on the y_{t-1} coefficient
  double se_gamma = 0.0;
  double s2 = 0.0;           // residual variance, RSS/(n-2)
  std::vector<double> residuals;
};

PpRegression pp_regression(const std::vector<double>& series) {
  const std::size_t t_len = series.size();
  const std::size_t n = t_len - 1;
  Matrix x(n, 2);
  std::vector<double> dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = series[i];
    dy[i] = series[i + 1] - series[i];
  }
  LeastSquaresFit fit;
  try {
    fit = solve_least_squares(x, dy);
  } catch (const RankDeficiencyError&) {
    throw EstimationError("unit-root regression degenerate: constant series");
  }
  PpRegression out;
  const double df = static_cast<double>(n) - 2.0;
  out.s2 = fit.residual_sum_squares / df;
  out.se_gamma = std::sqrt(out.s2 * fit.xtx_inverse(1, 1));
  if (!(out.se_gamma > 0.0))
    throw EstimationError(
        "unit-root regression degenerate: zero residual variance (deterministic series)");
  out.t_statistic = fit.coefficients[1] / out.se_gamma;
  out.residuals = std::move(fit.residuals);
  return out;
}

// Bartlett-kernel long-run variance of the regression residuals.
double long_run_variance(const std::vector<double>& e, int lags) {
  const double n = static_cast<double>(e.size());
  double gamma0 = 0.0;
  for (double v : e) gamma0 += v * v;
  gamma0 /= n;
  double lrv = gamma0;
  for (int j = 1; j <= lags; ++j) {
    if (static_cast<std::size_t>(j) >= e.size()) break;
    double gj = 0.0;
    for (std::size_t t = j; t < e.size(); ++t) gj += e[t] * e[t - j];
    gj /= n;
    lrv += 2.0 * (1.0 - static_cast<double>(j) / (lags + 1.0)) * gj;
  }
  return lrv;
}

}  // namespace

double mackinnon_pvalue_constant(double tau) {
  // Response-surface coefficients for the constant-only, no-trend case:
  // p = Phi(polynomial(tau)), with one polynomial below tau* and one above.
  constexpr double kTauStar = -1.61;
  constexpr double kTauMin = -18.83;
  constexpr double kTauMax = 2.74;
  constexpr double kSmall[3] = {2.1659, 1.4412, 3.8269e-2};
  constexpr double kLarge[4] = {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2};

  if (tau <= kTauMin) return 0.0;
  if (tau >= kTauMax) return 1.0;
  double z;
  if (tau <= kTauStar) {
    z = kSmall[0] + tau * (kSmall[1] + tau * kSmall[2]);
  } else {
    z = kLarge[0] + tau * (kLarge[1] + tau * (kLarge[2] + tau * kLarge[3]));
  }
  return cdf_normal(z);
}

EntityUnitRootStat pp_test_entity(const std::vector<double>& series, int lags,
                                  const std::string& entity) {
  if (lags < 0) throw DomainError("pp_test_entity: negative bandwidth");
  if (series.size() < static_cast<std::size_t>(lags) + 4)
    throw EstimationError("pp_test_entity: series length " + std::to_string(series.size()) +
                          " below required " + std::to_string(lags + 4));
  const PpRegression reg = pp_regression(series);

  const double n = static_cast<double>(series.size() - 1);
  double gamma0 = 0.0;
  for (double v : reg.residuals) gamma0 += v * v;
  gamma0 /= n;
  const double lrv = long_run_variance(reg.residuals, lags);
  if (!(lrv > 0.0))
    throw EstimationError("pp_test_entity: non-positive long-run variance");

  // Z_tau = sqrt(γ0/λ²) t - (λ² - γ0) n se(γ) / (2 λ s).
  const double z_tau = std::sqrt(gamma0 / lrv) * reg.t_statistic -
                       (lrv - gamma0) * n * reg.se_gamma /
                           (2.0 * std::sqrt(lrv) * std::sqrt(reg.s2));

  EntityUnitRootStat stat;
  stat.entity = entity;
  stat.t_statistic = z_tau;
  stat.lags_used = lags;
  double p = mackinnon_pvalue_constant(z_tau);
  if (p < kUnitRootPFloor) {
    p = kUnitRootPFloor;
    stat.p_clamped = true;
  } else if (p > 1.0 - kUnitRootPFloor) {
    p = 1.0 - kUnitRootPFloor;
    stat.p_clamped = true;
  }
  stat.p_value = p;
  return stat;
}

std::string LagPolicy::label() const {
  if (kind == Kind::Escalate) return "escalate";
  return "fixed(" + std::to_string(fixed_lags) + ")";
}

int select_lags(const std::vector<double>& series, const LagPolicy& policy) {
  if (policy.kind == LagPolicy::Kind::Fixed) {
    if (policy.fixed_lags < 1) throw ConfigError("fixed lag policy needs k >= 1");
    return policy.fixed_lags;
  }
  if (series.size() < 5)
    throw EstimationError("select_lags: series length " + std::to_string(series.size()) +
                          " below required 5");
  const double t_len = static_cast<double>(series.size());
  int cap = static_cast<int>(std::floor(4.0 * std::pow(t_len / 100.0, 2.0 / 9.0)));
  cap = std::max(cap, 1);
  // The bandwidth may not exceed what the regression sample supports.
  cap = std::min(cap, static_cast<int>(series.size()) - 4);
  cap = std::max(cap, 1);

  const PpRegression reg = pp_regression(series);
  for (int lag = 1; lag <= cap; ++lag)
    if (long_run_variance(reg.residuals, lag) > 0.0) return lag;
  return cap;
}

FisherCombination fisher_combine(const std::vector<EntityUnitRootStat>& stats) {
  const std::size_t n = stats.size();
  if (n < 2)
    throw EstimationError("fisher_combine needs at least 2 entity statistics, got " +
                          std::to_string(n));

  FisherCombination out;
  double sum_log = 0.0, sum_probit = 0.0, sum_logit = 0.0;
  for (const auto& s : stats) {
    double p = s.p_value;
    if (p < kUnitRootPFloor || p > 1.0 - kUnitRootPFloor) {
      p = std::clamp(p, kUnitRootPFloor, 1.0 - kUnitRootPFloor);
      out.any_p_clamped = true;
    }
    if (s.p_clamped) out.any_p_clamped = true;
    sum_log += std::log(p);
    sum_probit += quantile_normal(p);
    sum_logit += std::log(p / (1.0 - p));
  }
  const double nn = static_cast<double>(n);

  out.inverse_chi_squared_p.statistic = -2.0 * sum_log;
  out.inverse_chi_squared_p.distribution = Distribution::chi_squared(2.0 * nn);
  out.inverse_chi_squared_p.tail = Tail::Upper;

  out.inverse_normal_z.statistic = sum_probit / std::sqrt(nn);
  out.inverse_normal_z.distribution = Distribution::normal();
  out.inverse_normal_z.tail = Tail::Lower;

  const double pi = 3.14159265358979323846;
  const double k = pi * pi * nn * (5.0 * nn + 4.0) / (3.0 * (5.0 * nn + 2.0));
  out.inverse_logit_l_star.statistic = sum_logit / std::sqrt(k);
  out.inverse_logit_l_star.distribution = Distribution::student_t(5.0 * nn + 4.0);
  out.inverse_logit_l_star.tail = Tail::Lower;

  for (FisherStat* s : {&out.inverse_chi_squared_p, &out.inverse_normal_z,
                        &out.inverse_logit_l_star}) {
    s->p_value = tail_probability(s->distribution, s->tail, s->statistic);
    s->significant_5pct = s->p_value < 0.05;
  }
  return out;
}

UnitRootReport unit_root_report(const GrowthPanel& gp, GrowthVariable variable,
                                const LagPolicy& policy) {
  UnitRootReport report;
  report.variable = variable;
  report.policy = policy;

  for (const auto& entity : gp.entities()) {
    std::vector<double> series;
    for (const auto& r : gp.entity_rows(entity))
      series.push_back(variable == GrowthVariable::P ? r.p : r.q);
    try {
      const int lags = select_lags(series, policy);
      report.entity_stats.push_back(pp_test_entity(series, lags, entity));
    } catch (const Error& e) {
      report.exclusions.push_back(entity + ": " + e.what());
    }
  }

  for (const auto& s : report.entity_stats)
    if (s.lags_used > 1) report.lag_superscript = 'b';

  if (report.entity_stats.size() >= 2)
    report.combination = fisher_combine(report.entity_stats);
  else
    report.exclusions.push_back(
        "combination skipped: fewer than 2 entities with usable statistics");
  return report;
}

}  // namespace verdoorn
