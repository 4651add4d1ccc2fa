#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "verdoorn/estimators.hpp"
#include "verdoorn/panel_data.hpp"

namespace verdoorn {

// Synthetic-panel data generating process for p = a + b q + u_i + e_it.
struct DgpSpec {
  std::size_t n_entities = 7;
  std::size_t n_periods = 8;
  double intercept = 0.0;
  double slope = 0.7;
  double entity_effect_sd = 0.0;  // sd of the normal part of u_i
  double noise_sd = 0.02;         // stationary sd of e_it
  double endogeneity = 0.0;       // u_i gains endogeneity * mean(q_i)
  double ar1_rho = 0.0;           // AR(1) parameter of e_it
  bool unit_root = false;         // emit q as a random walk instead of i.i.d.
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// q innovations are N(0, 0.05); their scale is fixed, not configurable.
inline constexpr double kDgpQMean = 0.0;
inline constexpr double kDgpQSd = 0.05;

// Deterministic for a fixed seed: per entity, draw the q series, then the
// entity effect, then the AR(1) noise, in that order.
GrowthPanel generate_panel(const DgpSpec& spec);

struct McSummary {
  std::size_t replications = 0;
  std::size_t failures = 0;
  double true_slope = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double rejection_rate = 0.0;  // share rejecting slope = 0 at 5%
  double coverage_95 = 0.0;     // share of 95% CIs containing the true slope
};

// Runs `replications` independent draws; replication r uses
// replication_seed(spec.seed, r) regardless of execution order. Estimator
// failures are counted and excluded from the moments; if every replication
// fails the study itself fails.
McSummary run_study(const DgpSpec& spec, Method estimator, std::size_t replications,
                    const DpdOptions& dpd = {});

struct StudyConfig {
  DgpSpec dgp;
  Method estimator = Method::FE;
  std::size_t replications = 100;
  DpdOptions dpd;
};

// Plain key = value study file; '#' starts a comment. Unknown keys are
// configuration errors.
StudyConfig load_study_config(std::istream& in);
StudyConfig load_study_config_file(const std::string& path);

void write_summary_csv(std::ostream& out, const StudyConfig& config, const McSummary& s);

}  // namespace verdoorn
