#pragma once

#include <optional>
#include <string>
#include <vector>

#include "verdoorn/panel_data.hpp"
#include "verdoorn/test_result.hpp"

namespace verdoorn {

struct EntityUnitRootStat {
  std::string entity;
  double t_statistic = 0.0;  // Phillips-Perron corrected tau
  int lags_used = 1;         // Newey-West bandwidth
  double p_value = 0.5;      // clamped to [1e-6, 1 - 1e-6]
  bool p_clamped = false;
};

inline constexpr double kUnitRootPFloor = 1e-6;

// Phillips-Perron tau on Δy_t = α + γ y_{t-1} + e_t with a Bartlett-kernel
// long-run variance at the given bandwidth; p-value from the MacKinnon
// response surface for the constant-only case.
EntityUnitRootStat pp_test_entity(const std::vector<double>& series, int lags,
                                  const std::string& entity = "");

// MacKinnon approximate p-value for the constant-only tau statistic.
double mackinnon_pvalue_constant(double tau);

struct LagPolicy {
  enum class Kind { Fixed, Escalate };
  Kind kind = Kind::Fixed;
  int fixed_lags = 1;

  static LagPolicy fixed(int k) { return {Kind::Fixed, k}; }
  static LagPolicy escalate() { return {Kind::Escalate, 1}; }
  std::string label() const;
};

// fixed(k) returns k. escalate starts at 1 and raises the bandwidth up to
// floor(4 (T/100)^{2/9}), returning the first lag with a positive long-run
// variance (never 0).
int select_lags(const std::vector<double>& series, const LagPolicy& policy);

struct FisherStat {
  double statistic = 0.0;
  Distribution distribution;
  Tail tail = Tail::Upper;
  double p_value = 1.0;
  bool significant_5pct = false;
};

struct FisherCombination {
  FisherStat inverse_chi_squared_p;  // P = -2 Σ ln p_i, chi2(2N) upper tail
  FisherStat inverse_normal_z;       // Z = Σ Φ⁻¹(p_i)/√N, normal lower tail
  FisherStat inverse_logit_l_star;   // L* = Σ logit(p_i)/√k, t(5N+4) lower tail
  bool any_p_clamped = false;
};

FisherCombination fisher_combine(const std::vector<EntityUnitRootStat>& stats);

enum class GrowthVariable { P, Q };

struct UnitRootReport {
  GrowthVariable variable = GrowthVariable::P;
  LagPolicy policy;
  std::vector<EntityUnitRootStat> entity_stats;
  std::optional<FisherCombination> combination;  // absent when < 2 entities remain
  std::vector<std::string> exclusions;
  char lag_superscript = 'a';  // 'b' when any entity used more than one lag
};

UnitRootReport unit_root_report(const GrowthPanel& gp, GrowthVariable variable,
                                const LagPolicy& policy);

}  // namespace verdoorn
