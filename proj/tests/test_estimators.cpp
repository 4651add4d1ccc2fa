#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "verdoorn/estimators.hpp"
#include "verdoorn/montecarlo.hpp"
#include "verdoorn/rng.hpp"

using namespace verdoorn;

namespace {

GrowthPanel panel_from(const std::vector<GrowthRow>& rows) { return GrowthPanel(rows); }

GrowthPanel random_unbalanced_panel(Rng& rng, std::size_t max_entities = 10,
                                    std::size_t max_periods = 12) {
  std::vector<GrowthRow> rows;
  const std::size_t n_entities = 2 + static_cast<std::size_t>(rng.uniform01() * (max_entities - 2));
  for (std::size_t e = 0; e < n_entities; ++e) {
    const std::size_t t_len =
        3 + static_cast<std::size_t>(rng.uniform01() * (max_periods - 3));
    const double effect = rng.normal(0.0, 0.05);
    for (std::size_t t = 0; t < t_len; ++t) {
      if (rng.uniform01() < 0.15) continue;  // unbalance
      GrowthRow r;
      r.entity = "E" + std::to_string(e);
      r.period = static_cast<int>(t) + 1;
      r.q = rng.normal(0.02, 0.05);
      r.p = 0.01 + 0.7 * r.q + effect + rng.normal(0.0, 0.02);
      rows.push_back(r);
    }
  }
  return GrowthPanel(rows);
}

// LSDV oracle: regress p on entity dummies plus q; the q coefficient must
// match the within estimator.
double lsdv_slope(const GrowthPanel& gp) {
  const auto& rows = gp.rows();
  const auto& entities = gp.entities();
  std::map<std::string, std::size_t> entity_index;
  for (std::size_t e = 0; e < entities.size(); ++e) entity_index[entities[e]] = e;
  Matrix x(rows.size(), entities.size() + 1, 0.0);
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x(i, entity_index[rows[i].entity]) = 1.0;
    x(i, entities.size()) = rows[i].q;
    y[i] = rows[i].p;
  }
  return solve_least_squares(x, y).coefficients[entities.size()];
}

}  // namespace

TEST_CASE("identity panel: OLS, FE, RE all recover slope 1 intercept 0") {
  std::vector<GrowthRow> rows;
  Rng rng(3);
  for (int e = 0; e < 4; ++e)
    for (int t = 1; t <= 6; ++t) {
      const double q = rng.normal(0.0, 0.1);
      rows.push_back({"E" + std::to_string(e), t, q, q});
    }
  auto gp = panel_from(rows);
  for (Method m : {Method::OLS, Method::FE, Method::RE}) {
    auto r = estimate(m, gp);
    CHECK(std::fabs(r.slope.value - 1.0) < 1e-10);
    CHECK(std::fabs(r.intercept.value) < 1e-10);
    if (m == Method::OLS) CHECK(*r.r_squared_overall == doctest::Approx(1.0).epsilon(1e-12));
    else CHECK(*r.r_squared_within == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(estimate_ols(gp).rss == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("three-point OLS matches the hand oracle") {
  // (q, p) = (0,0), (1,1), (2,1): slope 1/2, intercept 1/6, R^2 3/4.
  auto gp = panel_from({{"A", 1, 0.0, 0.0}, {"A", 2, 1.0, 1.0}, {"A", 3, 1.0, 2.0}});
  auto r = estimate_ols(gp);
  CHECK(r.slope.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.intercept.value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(*r.r_squared_overall == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("model F equals slope t² for the single regressor") {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    auto gp = random_unbalanced_panel(rng);
    auto ols = estimate_ols(gp);
    CHECK(std::fabs(ols.model_test.statistic -
                    ols.slope.t_statistic * ols.slope.t_statistic) < 1e-9);
    auto fe = estimate_fixed_effects(gp);
    CHECK(std::fabs(fe.model_test.statistic -
                    fe.slope.t_statistic * fe.slope.t_statistic) < 1e-9);
  }
}

TEST_CASE("constant q raises a degenerate-regressor error") {
  // GrowthRow carries (entity, period, p, q); q is pinned at 0.1 throughout.
  auto gp = panel_from({{"A", 1, 0.03, 0.1}, {"A", 2, 0.01, 0.1}, {"B", 1, 0.02, 0.1},
                        {"B", 2, 0.05, 0.1}});
  CHECK_THROWS_AS(estimate_ols(gp), EstimationError);
  CHECK_THROWS_AS(estimate_fixed_effects(gp), EstimationError);
}

TEST_CASE("FE: entity-shifted identity gives slope exactly 1 and within R² 1") {
  std::vector<GrowthRow> rows;
  Rng rng(23);
  for (int e = 0; e < 2; ++e) {
    const double c = e == 0 ? 0.3 : -0.2;
    for (int t = 1; t <= 5; ++t) {
      const double q = rng.normal(0.0, 0.1);
      rows.push_back({"E" + std::to_string(e), t, q + c, q});
    }
  }
  auto r = estimate_fixed_effects(panel_from(rows));
  CHECK(std::fabs(r.slope.value - 1.0) < 1e-12);
  CHECK(*r.r_squared_within == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("FE slope equals the LSDV dummy-variable oracle") {
  Rng rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    auto gp = random_unbalanced_panel(rng);
    auto fe = estimate_fixed_effects(gp);
    CHECK(std::fabs(fe.slope.value - lsdv_slope(gp)) < 1e-8);
  }
}

TEST_CASE("FE is invariant to entity-level shifts in q") {
  Rng rng(37);
  auto gp = random_unbalanced_panel(rng);
  auto base = estimate_fixed_effects(gp);

  std::vector<GrowthRow> shifted = gp.rows();
  const std::string first = gp.entities().front();
  for (auto& r : shifted)
    if (r.entity == first) r.q += 100.0;
  auto moved = estimate_fixed_effects(panel_from(shifted));
  CHECK(moved.slope.value == doctest::Approx(base.slope.value).epsilon(1e-9));
  CHECK(moved.slope.t_statistic == doctest::Approx(base.slope.t_statistic).epsilon(1e-7));
}

TEST_CASE("FE entity effects average to zero with row-count weights") {
  Rng rng(41);
  auto gp = random_unbalanced_panel(rng);
  auto fe = estimate_fixed_effects(gp);
  double weighted = 0.0;
  std::size_t total = 0;
  for (const auto& [entity, effect] : fe.entity_effects) {
    const auto m = gp.entity_rows(entity).size();
    weighted += effect * static_cast<double>(m);
    total += m;
  }
  CHECK(std::fabs(weighted / static_cast<double>(total)) < 1e-12);
}

TEST_CASE("RE with a clamped variance component equals pooled OLS") {
  // sigma_u = 0 makes roughly half the draws clamp; find one deterministically.
  DgpSpec spec;
  spec.n_entities = 5;
  spec.n_periods = 5;
  spec.entity_effect_sd = 0.0;
  spec.noise_sd = 0.02;
  bool found = false;
  for (std::uint64_t seed = 1; seed <= 50 && !found; ++seed) {
    spec.seed = seed;
    auto gp = generate_panel(spec);
    auto re = estimate_random_effects(gp);
    if (re.notes.empty()) continue;
    found = true;
    auto ols = estimate_ols(gp);
    CHECK(std::fabs(re.slope.value - ols.slope.value) < 1e-10);
    CHECK(std::fabs(re.intercept.value - ols.intercept.value) < 1e-10);
    CHECK(std::fabs(re.slope.t_statistic - ols.slope.t_statistic) < 1e-8);
  }
  CHECK(found);
}

TEST_CASE("RE approaches FE as entity effects dominate") {
  DgpSpec spec;
  spec.n_entities = 6;
  spec.n_periods = 8;
  spec.noise_sd = 0.02;
  spec.seed = 99;
  auto gp = generate_panel(spec);
  // Inject huge entity intercepts.
  std::vector<GrowthRow> rows = gp.rows();
  std::map<std::string, double> bump;
  Rng rng(123);
  for (const auto& e : gp.entities()) bump[e] = rng.normal(0.0, 50.0);
  for (auto& r : rows) r.p += bump[r.entity];
  auto big = panel_from(rows);
  auto re = estimate_random_effects(big);
  auto fe = estimate_fixed_effects(big);
  CHECK(std::fabs(re.slope.value - fe.slope.value) < 1e-3);
}

TEST_CASE("balanced panels give one common quasi-demeaning factor") {
  // With equal T_i and sigma_u > 0 the RE transform treats entities
  // symmetrically: permuting entity labels leaves the slope unchanged.
  DgpSpec spec;
  spec.n_entities = 6;
  spec.n_periods = 6;
  spec.entity_effect_sd = 0.05;
  spec.noise_sd = 0.02;
  spec.seed = 7;
  auto gp = generate_panel(spec);
  auto re = estimate_random_effects(gp);

  std::vector<GrowthRow> relabeled = gp.rows();
  for (auto& r : relabeled) {
    // Reverse the entity order.
    const int idx = r.entity[3] - '0';
    r.entity = "E00" + std::to_string(7 - idx);
  }
  auto re2 = estimate_random_effects(panel_from(relabeled));
  CHECK(re2.slope.value == doctest::Approx(re.slope.value).epsilon(1e-12));
}

TEST_CASE("slope t-statistics are invariant under positive rescaling of q") {
  Rng rng(53);
  for (int rep = 0; rep < 5; ++rep) {
    auto gp = random_unbalanced_panel(rng);
    const double c = std::exp(rng.uniform(-2.0, 2.0));
    std::vector<GrowthRow> scaled = gp.rows();
    for (auto& r : scaled) r.q *= c;
    auto gp2 = panel_from(scaled);
    for (Method m : {Method::OLS, Method::FE, Method::RE}) {
      auto a = estimate(m, gp);
      auto b = estimate(m, gp2);
      CHECK(std::fabs(a.slope.t_statistic - b.slope.t_statistic) < 1e-9 *
            std::max(1.0, std::fabs(a.slope.t_statistic)));
      CHECK(b.slope.value * c == doctest::Approx(a.slope.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("RE slope lies between OLS and FE slopes on balanced panels") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 100; ++seed) {
    REQUIRE(seed < 400);
    DgpSpec spec;
    spec.n_entities = 6;
    spec.n_periods = 6;
    spec.entity_effect_sd = 0.04;
    spec.noise_sd = 0.02;
    spec.seed = seed;
    auto gp = generate_panel(spec);
    auto re = estimate_random_effects(gp);
    if (!re.notes.empty()) continue;  // clamped draws are out of scope
    auto ols = estimate_ols(gp);
    auto fe = estimate_fixed_effects(gp);
    const double lo = std::min(ols.slope.value, fe.slope.value) - 1e-10;
    const double hi = std::max(ols.slope.value, fe.slope.value) + 1e-10;
    CHECK(re.slope.value >= lo);
    CHECK(re.slope.value <= hi);
    ++checked;
  }
}

TEST_CASE("DPD: just-identified GMM equals the explicit 2SLS oracle") {
  // 4 entities, 3 periods each: one differenced equation per entity, one lag
  // instrument, Δq and the constant. k_z == k_x == 3.
  Rng rng(61);
  std::vector<GrowthRow> rows;
  for (int e = 0; e < 4; ++e)
    for (int t = 1; t <= 3; ++t) {
      GrowthRow r;
      r.entity = "E" + std::to_string(e);
      r.period = t;
      r.q = rng.normal(0.02, 0.05);
      r.p = 0.01 + 0.7 * r.q + rng.normal(0.0, 0.02);
      rows.push_back(r);
    }
  auto gp = panel_from(rows);
  DpdOptions opts;
  opts.max_instrument_lags = 1;
  auto gmm = estimate_dpd_gmm(gp, opts);
  REQUIRE(gmm.n_instruments.has_value());
  CHECK(*gmm.n_instruments == 3);
  CHECK(gmm.n_observations == 4);

  // Oracle: theta = (Z'X)^-1 Z'y with the same instrument matrix, built
  // independently here.
  Matrix z(4, 3, 0.0), x(4, 3, 0.0);
  std::vector<double> y(4);
  for (int e = 0; e < 4; ++e) {
    auto er = gp.entity_rows("E" + std::to_string(e));
    const double p1 = er[0].p, p2 = er[1].p, p3 = er[2].p;
    const double q2 = er[1].q, q3 = er[2].q;
    y[e] = p3 - p2;
    x(e, 0) = 1.0;
    x(e, 1) = p2 - p1;
    x(e, 2) = q3 - q2;
    z(e, 0) = p1;
    z(e, 1) = q3 - q2;
    z(e, 2) = 1.0;
  }
  const Matrix ztx = z.transposed() * x;
  const std::vector<double> zty = z.transposed() * y;
  auto oracle = solve_least_squares(ztx, zty).coefficients;
  CHECK(std::fabs(gmm.intercept.value - oracle[0]) < 1e-8);
  REQUIRE(gmm.lagged_dependent.has_value());
  CHECK(std::fabs(gmm.lagged_dependent->value - oracle[1]) < 1e-8);
  CHECK(std::fabs(gmm.slope.value - oracle[2]) < 1e-8);
}

TEST_CASE("DPD instrument count matches brute-force enumeration at 7x8") {
  DgpSpec spec;
  spec.n_entities = 7;
  spec.n_periods = 8;
  spec.entity_effect_sd = 0.02;
  spec.noise_sd = 0.02;
  spec.seed = 2024;
  auto gp = generate_panel(spec);
  auto r = estimate_dpd_gmm(gp, {.max_instrument_lags = 99});

  // Brute force: equations exist at t = 3..8; depth d needs a level at t-d.
  std::size_t lag_cols = 0;
  for (int t = 3; t <= 8; ++t)
    for (int d = 2; t - d >= 1; ++d) ++lag_cols;
  REQUIRE(r.n_instruments.has_value());
  CHECK(*r.n_instruments == lag_cols + 2);
  CHECK(*r.n_instruments == 23);
  CHECK(r.n_observations == 42);
}

TEST_CASE("DPD refuses more instruments than usable rows") {
  // 2 entities with exactly 3 periods: 2 equations but 3 instruments.
  Rng rng(71);
  std::vector<GrowthRow> rows;
  for (int e = 0; e < 2; ++e)
    for (int t = 1; t <= 3; ++t) {
      GrowthRow r;
      r.entity = "E" + std::to_string(e);
      r.period = t;
      r.q = rng.normal(0.0, 0.05);
      r.p = 0.7 * r.q + rng.normal(0.0, 0.02);
      rows.push_back(r);
    }
  try {
    estimate_dpd_gmm(panel_from(rows), {.max_instrument_lags = 1});
    FAIL("expected EstimationError");
  } catch (const EstimationError& e) {
    const std::string what = e.what();
    CHECK(what.find("2 rows") != std::string::npos);
    CHECK(what.find("3 instruments") != std::string::npos);
  }
}

TEST_CASE("DPD without the lagged dependent still identifies the slope") {
  DgpSpec spec;
  spec.n_entities = 7;
  spec.n_periods = 8;
  spec.entity_effect_sd = 0.03;
  spec.noise_sd = 0.01;
  spec.seed = 5;
  auto gp = generate_panel(spec);
  auto r = estimate_dpd_gmm(gp, {.max_instrument_lags = 2, .include_lagged_dependent = false});
  CHECK_FALSE(r.lagged_dependent.has_value());
  CHECK(std::fabs(r.slope.value - 0.7) < 0.2);
}
