#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "verdoorn/panel_data.hpp"
#include "verdoorn/test_result.hpp"

namespace verdoorn {

enum class Method { OLS, FE, RE, DPD };

std::string method_label(Method m);
Method parse_method(const std::string& label);  // throws ConfigError

struct Coefficient {
  double value = 0.0;
  double std_error = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  bool significant_5pct = false;
};

// One estimator row of the regression p_it = a + b q_it.
struct EstimateResult {
  Method method = Method::OLS;
  Coefficient intercept;
  Coefficient slope;  // the Verdoorn coefficient b
  TestResult model_test;
  std::optional<double> r_squared_within;
  std::optional<double> r_squared_overall;
  std::size_t n_observations = 0;
  std::optional<std::size_t> n_instruments;
  std::map<std::string, double> entity_effects;  // FE only

  // Carriers for the specification tests and diagnostics.
  double rss = 0.0;
  double slope_variance = 0.0;
  double df_residual = 0.0;
  std::vector<double> residuals;  // aligned with the GrowthPanel rows
  std::optional<Coefficient> lagged_dependent;  // DPD only
  std::vector<std::string> notes;
};

// Pooled OLS with conventional standard errors; model F(1, n-2) = t².
EstimateResult estimate_ols(const GrowthPanel& gp);

// Within estimator. The reported intercept is the observation-weighted mean
// of (p̄_i - b q̄_i), so entity effects average to zero with row-count weights.
EstimateResult estimate_fixed_effects(const GrowthPanel& gp);

// Swamy-Arora feasible GLS. A negative variance-component estimate clamps to
// zero, degenerating to pooled OLS with a note instead of an error.
EstimateResult estimate_random_effects(const GrowthPanel& gp);

struct DpdOptions {
  int max_instrument_lags = 99;
  bool include_lagged_dependent = true;
};

// Arellano-Bond one-step difference GMM with a drift constant. Lagged levels
// of p instrument the lagged dependent difference; Δq instruments itself.
EstimateResult estimate_dpd_gmm(const GrowthPanel& gp, const DpdOptions& options = {});

EstimateResult estimate(Method method, const GrowthPanel& gp, const DpdOptions& dpd = {});

}  // namespace verdoorn
