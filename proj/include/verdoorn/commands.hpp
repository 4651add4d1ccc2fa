#pragma once

#include <set>
#include <string>
#include <vector>

#include "verdoorn/estimators.hpp"
#include "verdoorn/montecarlo.hpp"
#include "verdoorn/panel_data.hpp"
#include "verdoorn/unit_root.hpp"

namespace verdoorn {

// Exit codes shared by every subcommand.
inline constexpr int kExitClean = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitSkips = 4;

enum class OutputFormat { Text, Csv, JsonLines };

struct RunConfig {
  std::string input_path;
  CsvSchema schema;                       // entity/period/variable columns
  // Variable columns named explicitly must exist in the header; the default
  // trio (output, employment, productivity) is used only where present.
  std::set<std::string> explicit_variables;
  std::string industry_column = "industry";
  bool industry_column_explicit = false;  // error if set but absent from the header
  std::vector<std::string> industries;    // filter; empty = every industry found
  int from_period = -2147483647;
  int to_period = 2147483647;
  std::vector<Method> estimators = {Method::FE, Method::RE, Method::OLS, Method::DPD};
  DpdOptions dpd;
  LagPolicy lag_policy = LagPolicy::fixed(1);
  GrowthType growth = GrowthType::LogDifference;
  std::string out_dir = ".";
  std::set<OutputFormat> formats = {OutputFormat::Text, OutputFormat::Csv,
                                    OutputFormat::JsonLines};

  RunConfig() {
    schema.entity_column = "entity";
    schema.period_column = "year";
    schema.variable_columns = {{"output", "output"},
                               {"employment", "employment"},
                               {"productivity", "productivity"}};
  }
};

// Applies key = value overrides from a config file on top of flag values.
void apply_config_overrides(RunConfig& config, const std::string& path);

int cmd_fit(const RunConfig& config);
int cmd_unitroot(const RunConfig& config);
int cmd_scatter(const RunConfig& config);
int cmd_simulate(const std::string& study_path, const std::string& out_dir);

}  // namespace verdoorn
