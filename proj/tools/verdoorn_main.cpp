#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "verdoorn/commands.hpp"

namespace {

using verdoorn::RunConfig;

void add_panel_options(CLI::App* cmd, RunConfig& config, std::string& config_path,
                       std::string& estimators, std::string& formats,
                       std::string& lag_policy) {
  cmd->add_option("-i,--input", config.input_path, "panel CSV file")->required();
  cmd->add_option("-o,--out", config.out_dir, "output directory");
  cmd->add_option("--entity-col", config.schema.entity_column, "entity column name");
  cmd->add_option("--period-col", config.schema.period_column, "period column name");
  cmd->add_option("--output-col", config.schema.variable_columns["output"],
                  "output column name")
      ->each([&config](const std::string&) { config.explicit_variables.insert("output"); });
  cmd->add_option("--employment-col", config.schema.variable_columns["employment"],
                  "employment column name")
      ->each([&config](const std::string&) {
        config.explicit_variables.insert("employment");
      });
  cmd->add_option("--productivity-col", config.schema.variable_columns["productivity"],
                  "productivity column name")
      ->each([&config](const std::string&) {
        config.explicit_variables.insert("productivity");
      });
  auto* ind = cmd->add_option("--industry-col", config.industry_column,
                              "industry column name");
  ind->each([&config](const std::string&) { config.industry_column_explicit = true; });
  cmd->add_option("--industries", config.industries,
                  "industries to process (default: all found)");
  cmd->add_option("--from", config.from_period, "first period of the window");
  cmd->add_option("--to", config.to_period, "last period of the window");
  cmd->add_option("--estimators", estimators, "comma-separated subset of FE,RE,OLS,DPD");
  cmd->add_option("--dpd-max-lags", config.dpd.max_instrument_lags,
                  "instrument lag truncation for the GMM row");
  cmd->add_flag("--no-dpd-lagged-dependent",
                [&config](std::int64_t) { config.dpd.include_lagged_dependent = false; },
                "drop the lagged dependent variable from the GMM row");
  cmd->add_option("--lag-policy", lag_policy, "unit-root bandwidth: fixed:<k> or escalate");
  cmd->add_option("--growth", [&config](const std::vector<std::string>& v) {
        if (v[0] == "log") config.growth = verdoorn::GrowthType::LogDifference;
        else if (v[0] == "pct") config.growth = verdoorn::GrowthType::PercentChange;
        else return false;
        return true;
      }, "growth rates: log (default) or pct");
  cmd->add_option("--formats", formats, "comma-separated subset of text,csv,jsonl");
  cmd->add_option("--config", config_path, "key = value file overriding these flags");
}

bool apply_lists(RunConfig& config, const std::string& estimators,
                 const std::string& formats, const std::string& lag_policy) {
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    for (char c : s) {
      if (c == ',') {
        if (!item.empty()) out.push_back(item);
        item.clear();
      } else if (c != ' ') {
        item += c;
      }
    }
    if (!item.empty()) out.push_back(item);
    return out;
  };
  if (!estimators.empty()) {
    config.estimators.clear();
    for (const auto& e : split(estimators)) config.estimators.push_back(verdoorn::parse_method(e));
  }
  if (!formats.empty()) {
    config.formats.clear();
    for (const auto& f : split(formats)) {
      if (f == "text") config.formats.insert(verdoorn::OutputFormat::Text);
      else if (f == "csv") config.formats.insert(verdoorn::OutputFormat::Csv);
      else if (f == "jsonl") config.formats.insert(verdoorn::OutputFormat::JsonLines);
      else throw verdoorn::ConfigError("unknown format: " + f);
    }
  }
  if (!lag_policy.empty()) {
    if (lag_policy == "escalate") {
      config.lag_policy = verdoorn::LagPolicy::escalate();
    } else if (lag_policy.rfind("fixed:", 0) == 0) {
      config.lag_policy =
          verdoorn::LagPolicy::fixed(static_cast<int>(std::strtol(lag_policy.c_str() + 6,
                                                                  nullptr, 10)));
    } else {
      throw verdoorn::ConfigError("lag-policy must be 'escalate' or 'fixed:<k>'");
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verdoorn-law panel estimation toolkit"};
  app.require_subcommand(1);

  RunConfig fit_config, ur_config, sc_config;
  std::string fit_cfg_path, ur_cfg_path, sc_cfg_path;
  std::string fit_est, ur_est, sc_est;
  std::string fit_fmt, ur_fmt, sc_fmt;
  std::string fit_lag, ur_lag, sc_lag;

  auto* fit = app.add_subcommand("fit", "estimator table per industry");
  add_panel_options(fit, fit_config, fit_cfg_path, fit_est, fit_fmt, fit_lag);

  auto* unitroot = app.add_subcommand("unitroot", "Fisher-type unit-root table per industry");
  add_panel_options(unitroot, ur_config, ur_cfg_path, ur_est, ur_fmt, ur_lag);

  auto* scatter = app.add_subcommand("scatter", "growth-rate scatter CSV per industry");
  add_panel_options(scatter, sc_config, sc_cfg_path, sc_est, sc_fmt, sc_lag);

  std::string study_path, sim_out = ".";
  auto* simulate = app.add_subcommand("simulate", "run a replication study from a config");
  simulate->add_option("-s,--study", study_path, "study config file")->required();
  simulate->add_option("-o,--out", sim_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? verdoorn::kExitClean : verdoorn::kExitUsage;
  }

  try {
    if (fit->parsed()) {
      apply_lists(fit_config, fit_est, fit_fmt, fit_lag);
      if (!fit_cfg_path.empty()) verdoorn::apply_config_overrides(fit_config, fit_cfg_path);
      return verdoorn::cmd_fit(fit_config);
    }
    if (unitroot->parsed()) {
      apply_lists(ur_config, ur_est, ur_fmt, ur_lag);
      if (!ur_cfg_path.empty()) verdoorn::apply_config_overrides(ur_config, ur_cfg_path);
      return verdoorn::cmd_unitroot(ur_config);
    }
    if (scatter->parsed()) {
      apply_lists(sc_config, sc_est, sc_fmt, sc_lag);
      if (!sc_cfg_path.empty()) verdoorn::apply_config_overrides(sc_config, sc_cfg_path);
      return verdoorn::cmd_scatter(sc_config);
    }
    if (simulate->parsed()) {
      return verdoorn::cmd_simulate(study_path, sim_out);
    }
  } catch (const verdoorn::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return verdoorn::kExitUsage;
  } catch (const verdoorn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return verdoorn::kExitData;
  }
  return verdoorn::kExitUsage;
}
