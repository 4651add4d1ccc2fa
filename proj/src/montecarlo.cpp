#include "verdoorn/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "verdoorn/rng.hpp"

namespace verdoorn {

void DgpSpec::validate() const {
  if (n_entities < 1) throw ConfigError("n_entities must be positive");
  if (n_periods < 2) throw ConfigError("n_periods must be at least 2");
  if (entity_effect_sd < 0.0) throw ConfigError("entity_effect_sd must be non-negative");
  if (noise_sd < 0.0) throw ConfigError("noise_sd must be non-negative");
  if (!unit_root && std::fabs(ar1_rho) >= 1.0)
    throw ConfigError("ar1_rho must lie strictly inside (-1, 1)");
}

GrowthPanel generate_panel(const DgpSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<GrowthRow> rows;
  rows.reserve(spec.n_entities * spec.n_periods);

  char name[16];
  for (std::size_t e = 0; e < spec.n_entities; ++e) {
    std::snprintf(name, sizeof name, "E%03zu", e + 1);

    std::vector<double> q(spec.n_periods);
    double level = 0.0;
    for (std::size_t t = 0; t < spec.n_periods; ++t) {
      const double innovation = rng.normal(kDgpQMean, kDgpQSd);
      if (spec.unit_root) {
        level += innovation;
        q[t] = level;
      } else {
        q[t] = innovation;
      }
    }
    double q_mean = 0.0;
    for (double v : q) q_mean += v;
    q_mean /= static_cast<double>(spec.n_periods);

    const double u = spec.endogeneity * q_mean + rng.normal(0.0, spec.entity_effect_sd);

    // AR(1) noise with stationary sd = noise_sd.
    const double innovation_sd = spec.noise_sd * std::sqrt(1.0 - spec.ar1_rho * spec.ar1_rho);
    double e_prev = rng.normal(0.0, spec.noise_sd);
    for (std::size_t t = 0; t < spec.n_periods; ++t) {
      const double e_t = t == 0 ? e_prev
                                : spec.ar1_rho * e_prev + rng.normal(0.0, innovation_sd);
      e_prev = e_t;
      GrowthRow r;
      r.entity = name;
      r.period = static_cast<int>(t) + 1;
      r.q = q[t];
      r.p = spec.intercept + spec.slope * q[t] + u + e_t;
      rows.push_back(std::move(r));
    }
  }
  return GrowthPanel(std::move(rows));
}

McSummary run_study(const DgpSpec& spec, Method estimator, std::size_t replications,
                    const DpdOptions& dpd) {
  if (replications < 1) throw ConfigError("replications must be at least 1");
  spec.validate();

  struct Draw {
    bool ok = false;
    double estimate = 0.0;
    bool rejected = false;
    bool covered = false;
  };
  std::vector<Draw> draws(replications);
  std::string last_error;

  for (std::size_t r = 0; r < replications; ++r) {
    DgpSpec draw_spec = spec;
    draw_spec.seed = replication_seed(spec.seed, r);
    try {
      const GrowthPanel panel = generate_panel(draw_spec);
      const EstimateResult fit = estimate(estimator, panel, dpd);
      Draw d;
      d.ok = true;
      d.estimate = fit.slope.value;
      d.rejected = fit.slope.significant_5pct;
      double critical;
      if (estimator == Method::DPD) {
        critical = quantile_normal(0.975);
      } else {
        // Student-t critical value by bisection on the cdf.
        double lo = 0.0, hi = 50.0;
        for (int i = 0; i < 100; ++i) {
          const double mid = 0.5 * (lo + hi);
          (cdf_student_t(mid, fit.df_residual) < 0.975 ? lo : hi) = mid;
        }
        critical = 0.5 * (lo + hi);
      }
      d.covered = std::fabs(fit.slope.value - spec.slope) <=
                  critical * std::sqrt(std::max(0.0, fit.slope_variance));
      draws[r] = d;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }

  McSummary s;
  s.replications = replications;
  s.true_slope = spec.slope;
  double sum = 0.0, sum_sq_err = 0.0;
  std::size_t ok = 0, rejected = 0, covered = 0;
  for (const auto& d : draws) {
    if (!d.ok) {
      ++s.failures;
      continue;
    }
    ++ok;
    sum += d.estimate;
    sum_sq_err += (d.estimate - spec.slope) * (d.estimate - spec.slope);
    if (d.rejected) ++rejected;
    if (d.covered) ++covered;
  }
  if (ok == 0)
    throw EstimationError("all " + std::to_string(replications) +
                          " replications failed; last error: " + last_error);
  s.mean_estimate = sum / static_cast<double>(ok);
  s.bias = s.mean_estimate - spec.slope;
  s.rmse = std::sqrt(sum_sq_err / static_cast<double>(ok));
  s.rejection_rate = static_cast<double>(rejected) / static_cast<double>(ok);
  s.coverage_95 = static_cast<double>(covered) / static_cast<double>(ok);
  return s;
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("study key '" + key + "': expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("study key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("study key '" + key + "': expected an integer, got '" + v + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

StudyConfig load_study_config(std::istream& in) {
  StudyConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("study file line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "estimator") cfg.estimator = parse_method(value);
    else if (key == "replications") cfg.replications = static_cast<std::size_t>(
        parse_int(value, key));
    else if (key == "n_entities") cfg.dgp.n_entities = static_cast<std::size_t>(
        parse_int(value, key));
    else if (key == "n_periods") cfg.dgp.n_periods = static_cast<std::size_t>(
        parse_int(value, key));
    else if (key == "intercept") cfg.dgp.intercept = parse_double(value, key);
    else if (key == "slope") cfg.dgp.slope = parse_double(value, key);
    else if (key == "entity_effect_sd") cfg.dgp.entity_effect_sd = parse_double(value, key);
    else if (key == "noise_sd") cfg.dgp.noise_sd = parse_double(value, key);
    else if (key == "endogeneity") cfg.dgp.endogeneity = parse_double(value, key);
    else if (key == "ar1_rho") cfg.dgp.ar1_rho = parse_double(value, key);
    else if (key == "unit_root") cfg.dgp.unit_root = parse_bool(value, key);
    else if (key == "seed") cfg.dgp.seed = static_cast<std::uint64_t>(parse_int(value, key));
    else if (key == "dpd_max_instrument_lags") cfg.dpd.max_instrument_lags =
        static_cast<int>(parse_int(value, key));
    else if (key == "dpd_include_lagged_dependent") cfg.dpd.include_lagged_dependent =
        parse_bool(value, key);
    else throw ConfigError("study file line " + std::to_string(line_no) +
                           ": unknown key '" + key + "'");
  }
  if (cfg.replications < 1) throw ConfigError("replications must be at least 1");
  cfg.dgp.validate();
  return cfg;
}

StudyConfig load_study_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open study file: " + path);
  return load_study_config(in);
}

void write_summary_csv(std::ostream& out, const StudyConfig& config, const McSummary& s) {
  out << "estimator,replications,failures,true_slope,mean_estimate,bias,rmse,"
         "rejection_rate,coverage_95\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                method_label(config.estimator).c_str(), s.replications, s.failures,
                s.true_slope, s.mean_estimate, s.bias, s.rmse, s.rejection_rate,
                s.coverage_95);
  out << buf;
}

}  // namespace verdoorn
