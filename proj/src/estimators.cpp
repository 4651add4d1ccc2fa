#include "verdoorn/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace verdoorn {

namespace {

struct EntityStats {
  std::string entity;
  std::size_t count = 0;
  double p_mean = 0.0;
  double q_mean = 0.0;
};

std::vector<EntityStats> entity_means(const GrowthPanel& gp) {
  std::vector<EntityStats> out;
  for (const auto& entity : gp.entities()) {
    EntityStats s;
    s.entity = entity;
    for (const auto& r : gp.entity_rows(entity)) {
      s.p_mean += r.p;
      s.q_mean += r.q;
      ++s.count;
    }
    s.p_mean /= static_cast<double>(s.count);
    s.q_mean /= static_cast<double>(s.count);
    out.push_back(std::move(s));
  }
  return out;
}

double variance_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / v.size();
}

Coefficient make_coefficient(double value, double std_error, const Distribution& reference) {
  Coefficient c;
  c.value = value;
  c.std_error = std_error;
  c.t_statistic = std_error > 0.0 ? value / std_error : 0.0;
  c.p_value = tail_probability(reference, Tail::TwoSided, c.t_statistic);
  c.significant_5pct = c.p_value < 0.05;
  return c;
}

double squared_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 1.0;  // degenerate: constant series
  const double r = sab / std::sqrt(saa * sbb);
  return std::min(1.0, r * r);
}

}  // namespace

std::string method_label(Method m) {
  switch (m) {
    case Method::OLS: return "OLS";
    case Method::FE: return "FE";
    case Method::RE: return "RE";
    case Method::DPD: return "DPD";
  }
  return "?";
}

Method parse_method(const std::string& label) {
  if (label == "OLS" || label == "ols") return Method::OLS;
  if (label == "FE" || label == "fe") return Method::FE;
  if (label == "RE" || label == "re") return Method::RE;
  if (label == "DPD" || label == "dpd") return Method::DPD;
  throw ConfigError("unknown estimator label: " + label);
}

EstimateResult estimate_ols(const GrowthPanel& gp) {
  const auto& rows = gp.rows();
  const std::size_t n = rows.size();
  if (n < 3)
    throw EstimationError("pooled OLS needs at least 3 rows, got " + std::to_string(n));
  std::vector<double> q(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = rows[i].q;
    p[i] = rows[i].p;
  }
  if (variance_of(q) <= 1e-24)
    throw EstimationError("degenerate regressor: q is constant across the panel");

  Matrix x(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = q[i];
  }
  auto fit = solve_least_squares(x, p);

  const double df = static_cast<double>(n) - 2.0;
  const double sigma2 = fit.residual_sum_squares / df;
  const Distribution ref = Distribution::student_t(df);

  EstimateResult r;
  r.method = Method::OLS;
  r.intercept =
      make_coefficient(fit.coefficients[0], std::sqrt(sigma2 * fit.xtx_inverse(0, 0)), ref);
  r.slope =
      make_coefficient(fit.coefficients[1], std::sqrt(sigma2 * fit.xtx_inverse(1, 1)), ref);
  r.slope_variance = sigma2 * fit.xtx_inverse(1, 1);
  r.rss = fit.residual_sum_squares;
  r.df_residual = df;
  r.residuals = fit.residuals;
  r.n_observations = n;

  const double p_mean = std::accumulate(p.begin(), p.end(), 0.0) / n;
  double tss = 0.0;
  for (double v : p) tss += (v - p_mean) * (v - p_mean);
  r.r_squared_overall = tss > 0.0 ? 1.0 - fit.residual_sum_squares / tss : 1.0;

  r.model_test = make_test_result("F", r.slope.t_statistic * r.slope.t_statistic,
                                  Distribution::f(1.0, df), Tail::Upper, "slope is zero");
  return r;
}

EstimateResult estimate_fixed_effects(const GrowthPanel& gp) {
  const auto& rows = gp.rows();
  const std::size_t n = rows.size();
  const auto stats = entity_means(gp);
  const std::size_t n_entities = stats.size();
  if (n_entities < 2)
    throw EstimationError("fixed effects needs at least 2 entities, got " +
                          std::to_string(n_entities));
  const double df = static_cast<double>(n) - static_cast<double>(n_entities) - 1.0;
  if (df <= 0.0) throw EstimationError("fixed effects has no residual degrees of freedom");

  std::map<std::string, const EntityStats*> by_entity;
  for (const auto& s : stats) by_entity[s.entity] = &s;

  // Demeaned single-regressor solve.
  Matrix xw(n, 1);
  std::vector<double> yw(n);
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* s = by_entity[rows[i].entity];
    xw(i, 0) = rows[i].q - s->q_mean;
    yw[i] = rows[i].p - s->p_mean;
    sxx += xw(i, 0) * xw(i, 0);
  }
  if (sxx <= 1e-24)
    throw EstimationError("degenerate regressor: q has no within-entity variation");

  auto fit = solve_least_squares(xw, yw);
  const double slope = fit.coefficients[0];
  const double sigma2 = fit.residual_sum_squares / df;
  const double slope_var = sigma2 * fit.xtx_inverse(0, 0);
  const Distribution ref = Distribution::student_t(df);

  // Observation-weighted grand means carry the intercept.
  double p_grand = 0.0, q_grand = 0.0;
  for (const auto& s : stats) {
    p_grand += s.p_mean * static_cast<double>(s.count);
    q_grand += s.q_mean * static_cast<double>(s.count);
  }
  p_grand /= static_cast<double>(n);
  q_grand /= static_cast<double>(n);
  const double intercept = p_grand - slope * q_grand;
  const double intercept_se =
      std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + q_grand * q_grand / sxx));

  EstimateResult r;
  r.method = Method::FE;
  r.slope = make_coefficient(slope, std::sqrt(slope_var), ref);
  r.intercept = make_coefficient(intercept, intercept_se, ref);
  r.slope_variance = slope_var;
  r.rss = fit.residual_sum_squares;
  r.df_residual = df;
  r.n_observations = n;
  r.residuals = fit.residuals;  // within residuals, aligned with rows

  for (const auto& s : stats)
    r.entity_effects[s.entity] = s.p_mean - slope * s.q_mean - intercept;

  double tss_within = 0.0;
  for (double v : yw) tss_within += v * v;
  r.r_squared_within = tss_within > 0.0 ? 1.0 - fit.residual_sum_squares / tss_within : 1.0;

  std::vector<double> fitted_xb(n), actual(n);
  for (std::size_t i = 0; i < n; ++i) {
    fitted_xb[i] = intercept + slope * rows[i].q;
    actual[i] = rows[i].p;
  }
  r.r_squared_overall = squared_correlation(fitted_xb, actual);

  r.model_test = make_test_result("F", r.slope.t_statistic * r.slope.t_statistic,
                                  Distribution::f(1.0, df), Tail::Upper, "slope is zero");
  return r;
}

EstimateResult estimate_random_effects(const GrowthPanel& gp) {
  const auto& rows = gp.rows();
  const std::size_t n = rows.size();
  const auto stats = entity_means(gp);
  const std::size_t n_entities = stats.size();
  if (n_entities < 3)
    throw EstimationError(
        "random effects needs at least 3 entities for the between regression, got " +
        std::to_string(n_entities));

  // Within pass for the idiosyncratic variance.
  EstimateResult fe = estimate_fixed_effects(gp);
  const double sigma_e2 = fe.rss / fe.df_residual;

  // Between regression on entity means.
  Matrix xb(n_entities, 2);
  std::vector<double> yb(n_entities);
  for (std::size_t i = 0; i < n_entities; ++i) {
    xb(i, 0) = 1.0;
    xb(i, 1) = stats[i].q_mean;
    yb[i] = stats[i].p_mean;
  }
  auto between = solve_least_squares(xb, yb);
  const double sigma_between2 =
      between.residual_sum_squares / (static_cast<double>(n_entities) - 2.0);

  double inv_t_sum = 0.0;
  for (const auto& s : stats) inv_t_sum += 1.0 / static_cast<double>(s.count);
  const double t_harmonic = static_cast<double>(n_entities) / inv_t_sum;

  double sigma_u2 = sigma_between2 - sigma_e2 / t_harmonic;
  EstimateResult r;
  r.method = Method::RE;
  if (sigma_u2 < 0.0) {
    sigma_u2 = 0.0;
    r.notes.push_back(
        "entity variance component clamped at zero; RE degenerates to pooled OLS");
  }

  // Quasi-demeaning factors.
  std::map<std::string, double> theta;
  std::map<std::string, const EntityStats*> by_entity;
  for (const auto& s : stats) {
    const double denom = static_cast<double>(s.count) * sigma_u2 + sigma_e2;
    theta[s.entity] = denom > 0.0 ? 1.0 - std::sqrt(sigma_e2 / denom) : 0.0;
    by_entity[s.entity] = &s;
  }

  Matrix xg(n, 2);
  std::vector<double> yg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto* s = by_entity[rows[i].entity];
    const double th = theta[rows[i].entity];
    xg(i, 0) = 1.0 - th;
    xg(i, 1) = rows[i].q - th * s->q_mean;
    yg[i] = rows[i].p - th * s->p_mean;
  }
  auto fit = solve_least_squares(xg, yg);

  const double df = static_cast<double>(n) - 2.0;
  const double sigma2 = fit.residual_sum_squares / df;
  const Distribution ref = Distribution::student_t(df);

  r.intercept =
      make_coefficient(fit.coefficients[0], std::sqrt(sigma2 * fit.xtx_inverse(0, 0)), ref);
  r.slope =
      make_coefficient(fit.coefficients[1], std::sqrt(sigma2 * fit.xtx_inverse(1, 1)), ref);
  r.slope_variance = sigma2 * fit.xtx_inverse(1, 1);
  r.rss = fit.residual_sum_squares;
  r.df_residual = df;
  r.n_observations = n;

  r.residuals.resize(n);
  std::vector<double> fitted(n), actual(n), fitted_within(n), actual_within(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto* s = by_entity[rows[i].entity];
    fitted[i] = r.intercept.value + r.slope.value * rows[i].q;
    actual[i] = rows[i].p;
    fitted_within[i] = r.slope.value * (rows[i].q - s->q_mean);
    actual_within[i] = rows[i].p - s->p_mean;
    r.residuals[i] = actual[i] - fitted[i];
  }
  r.r_squared_overall = squared_correlation(fitted, actual);
  r.r_squared_within = squared_correlation(fitted_within, actual_within);

  const double wald = r.slope.t_statistic * r.slope.t_statistic;
  r.model_test = make_test_result("Wald", wald, Distribution::chi_squared(1.0), Tail::Upper,
                                  "slope is zero");
  return r;
}

namespace {

struct DpdEquation {
  int period = 0;       // equation period t
  double dy = 0.0;      // Δp_t
  double dy_lag = 0.0;  // Δp_{t-1} (unused when the lagged dependent is off)
  double dx = 0.0;      // Δq_t
};

}  // namespace

EstimateResult estimate_dpd_gmm(const GrowthPanel& gp, const DpdOptions& options) {
  if (options.max_instrument_lags < 1)
    throw EstimationError("max_instrument_lags must be at least 1");
  const auto& entities = gp.entities();

  // Per-entity period -> (p, q) lookup.
  std::vector<std::map<int, std::pair<double, double>>> levels(entities.size());
  for (std::size_t e = 0; e < entities.size(); ++e)
    for (const auto& r : gp.entity_rows(entities[e]))
      levels[e][r.period] = {r.p, r.q};

  std::vector<std::vector<DpdEquation>> equations(entities.size());
  std::size_t n_eq = 0;
  for (std::size_t e = 0; e < entities.size(); ++e) {
    for (const auto& [t, pq] : levels[e]) {
      const auto prev = levels[e].find(t - 1);
      if (prev == levels[e].end()) continue;
      DpdEquation eq;
      eq.period = t;
      eq.dy = pq.first - prev->second.first;
      eq.dx = pq.second - prev->second.second;
      if (options.include_lagged_dependent) {
        const auto prev2 = levels[e].find(t - 2);
        if (prev2 == levels[e].end()) continue;
        eq.dy_lag = prev->second.first - prev2->second.first;
      }
      equations[e].push_back(eq);
      ++n_eq;
    }
  }
  if (n_eq == 0) throw EstimationError("no usable differenced rows for GMM");

  // Instrument layout: one column per (equation period, lag depth) with any
  // available level, then the exogenous Δq column and the constant.
  std::map<std::pair<int, int>, std::size_t> lag_columns;
  for (std::size_t e = 0; e < entities.size(); ++e)
    for (const auto& eq : equations[e])
      for (int depth = 2; depth <= options.max_instrument_lags + 1; ++depth)
        if (levels[e].count(eq.period - depth))
          lag_columns.emplace(std::make_pair(eq.period, depth), 0);
  std::size_t next = 0;
  for (auto& [key, col] : lag_columns) col = next++;
  const std::size_t n_lag_cols = next;
  const std::size_t kz = n_lag_cols + 2;
  const std::size_t kx = options.include_lagged_dependent ? 3 : 2;

  if (n_eq < kz)
    throw EstimationError(
        "GMM needs at least as many usable differenced rows as instruments: " +
        std::to_string(n_eq) + " rows < " + std::to_string(kz) + " instruments");

  EstimateResult r;
  r.method = Method::DPD;

  Matrix s_zhz(kz, kz, 0.0);
  Matrix g_zx(kz, kx, 0.0);
  std::vector<double> g_zy(kz, 0.0);

  struct EntityBlocks {
    Matrix z;
    Matrix x;
    std::vector<double> y;
  };
  std::vector<EntityBlocks> blocks;

  for (std::size_t e = 0; e < entities.size(); ++e) {
    const auto& eqs = equations[e];
    if (eqs.empty()) continue;
    const std::size_t m = eqs.size();
    EntityBlocks b;
    b.z = Matrix(m, kz, 0.0);
    b.x = Matrix(m, kx, 0.0);
    b.y.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& eq = eqs[i];
      b.y[i] = eq.dy;
      std::size_t c = 0;
      b.x(i, c++) = 1.0;
      if (options.include_lagged_dependent) b.x(i, c++) = eq.dy_lag;
      b.x(i, c++) = eq.dx;
      for (int depth = 2; depth <= options.max_instrument_lags + 1; ++depth) {
        const auto level = levels[e].find(eq.period - depth);
        if (level == levels[e].end()) continue;
        const auto col = lag_columns.find({eq.period, depth});
        if (col != lag_columns.end()) b.z(i, col->second) = level->second.first;
      }
      b.z(i, n_lag_cols) = eq.dx;
      b.z(i, n_lag_cols + 1) = 1.0;
    }

    // First-difference error covariance pattern: 2 on the diagonal, -1 where
    // equation periods are adjacent.
    Matrix h(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) h(i, j) = 2.0;
        else if (std::abs(eqs[i].period - eqs[j].period) == 1) h(i, j) = -1.0;
      }

    const Matrix zt = b.z.transposed();
    s_zhz = s_zhz + zt * h * b.z;
    const Matrix zx = zt * b.x;
    for (std::size_t i = 0; i < kz; ++i)
      for (std::size_t j = 0; j < kx; ++j) g_zx(i, j) += zx(i, j);
    const std::vector<double> zy = zt * b.y;
    for (std::size_t i = 0; i < kz; ++i) g_zy[i] += zy[i];

    blocks.push_back(std::move(b));
  }

  bool singular_w = false;
  Matrix w = pseudo_inverse_symmetric(s_zhz, &singular_w);
  if (singular_w)
    r.notes.push_back("singular one-step weighting matrix; pseudo-inverse used");

  const Matrix gt = g_zx.transposed();  // kx x kz
  const Matrix a = gt * w * g_zx;       // kx x kx
  const std::vector<double> c = gt * (w * g_zy);

  LeastSquaresFit theta_fit;
  try {
    theta_fit = solve_least_squares(a, c);
  } catch (const RankDeficiencyError&) {
    throw EstimationError("instruments do not identify the GMM parameters");
  }
  const std::vector<double>& theta = theta_fit.coefficients;

  // Robust one-step covariance: A⁻¹ G'W (Σ Z'v̂ v̂'Z) W G A⁻¹.
  Matrix meat(kz, kz, 0.0);
  for (const auto& b : blocks) {
    const std::size_t m = b.y.size();
    std::vector<double> zv(kz, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double fitted = 0.0;
      for (std::size_t j = 0; j < kx; ++j) fitted += b.x(i, j) * theta[j];
      const double v = b.y[i] - fitted;
      for (std::size_t j = 0; j < kz; ++j) zv[j] += b.z(i, j) * v;
    }
    for (std::size_t i = 0; i < kz; ++i)
      for (std::size_t j = 0; j < kz; ++j) meat(i, j) += zv[i] * zv[j];
  }
  const Matrix a_inv = pseudo_inverse_symmetric(a);
  const Matrix gw = gt * w;  // kx x kz
  const Matrix cov = a_inv * (gw * meat * gw.transposed()) * a_inv;

  const Distribution ref = Distribution::normal();
  std::size_t idx = 0;
  r.intercept = make_coefficient(theta[idx], std::sqrt(std::max(0.0, cov(idx, idx))), ref);
  ++idx;
  if (options.include_lagged_dependent) {
    r.lagged_dependent =
        make_coefficient(theta[idx], std::sqrt(std::max(0.0, cov(idx, idx))), ref);
    ++idx;
  }
  r.slope = make_coefficient(theta[idx], std::sqrt(std::max(0.0, cov(idx, idx))), ref);
  r.slope_variance = std::max(0.0, cov(idx, idx));

  r.n_observations = n_eq;
  r.n_instruments = kz;
  r.df_residual = static_cast<double>(n_eq) - static_cast<double>(kx);

  double rss = 0.0;
  for (const auto& b : blocks)
    for (std::size_t i = 0; i < b.y.size(); ++i) {
      double fitted = 0.0;
      for (std::size_t j = 0; j < kx; ++j) fitted += b.x(i, j) * theta[j];
      const double v = b.y[i] - fitted;
      rss += v * v;
    }
  r.rss = rss;

  const double wald = r.slope.t_statistic * r.slope.t_statistic;
  r.model_test = make_test_result("Wald", wald, Distribution::chi_squared(1.0), Tail::Upper,
                                  "slope is zero");
  return r;
}

EstimateResult estimate(Method method, const GrowthPanel& gp, const DpdOptions& dpd) {
  switch (method) {
    case Method::OLS: return estimate_ols(gp);
    case Method::FE: return estimate_fixed_effects(gp);
    case Method::RE: return estimate_random_effects(gp);
    case Method::DPD: return estimate_dpd_gmm(gp, dpd);
  }
  throw ConfigError("unknown estimator");
}

}  // namespace verdoorn
