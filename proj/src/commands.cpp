#include "verdoorn/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "verdoorn/report.hpp"
#include "verdoorn/spec_tests.hpp"

namespace verdoorn {

namespace {

using nlohmann::json;

double parse_fixed3(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

// JSON carries the same 3-decimal values the text table prints, so the two
// mirrors agree bit for bit after parsing.
double round3(double v) { return parse_fixed3(format_fixed3(v)); }

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "industry" : out;
}

struct LoadedIndustries {
  std::vector<std::pair<std::string, PanelDataset>> groups;
  int from = 0;
  int to = 0;
  std::vector<std::string> skipped;  // filter misses
};

LoadedIndustries load_industries(const RunConfig& config) {
  CsvSchema schema = config.schema;
  {
    // Default variable columns apply only where the header carries them;
    // explicitly requested ones stay hard requirements.
    std::ifstream peek(config.input_path, std::ios::binary);
    if (!peek) throw DataError("cannot open input file: " + config.input_path);
    const auto header = read_csv_header(peek);
    for (auto it = schema.variable_columns.begin(); it != schema.variable_columns.end();) {
      const bool in_header =
          std::find(header.begin(), header.end(), it->second) != header.end();
      if (!in_header && !config.explicit_variables.count(it->first))
        it = schema.variable_columns.erase(it);
      else
        ++it;
    }
  }

  std::ifstream in(config.input_path, std::ios::binary);
  if (!in) throw DataError("cannot open input file: " + config.input_path);
  auto groups = load_panel_csv_grouped(in, schema, config.industry_column,
                                       config.industry_column_explicit);

  LoadedIndustries out;
  if (!config.industries.empty()) {
    for (const auto& wanted : config.industries) {
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const auto& g) { return g.first == wanted; });
      if (it == groups.end())
        out.skipped.push_back(wanted + ": not present in the input");
      else
        out.groups.push_back(std::move(*it));
    }
  } else {
    out.groups = std::move(groups);
  }

  int lo = 2147483647, hi = -2147483647;
  for (auto& [name, ds] : out.groups) {
    ds = ds.restrict_periods(config.from_period, config.to_period);
    for (int p : ds.periods()) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
  }
  if (lo > hi) {
    lo = config.from_period;
    hi = config.to_period;
  }
  out.from = lo;
  out.to = hi;
  return out;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write output file: " + path);
  return out;
}

json coefficient_json(const Coefficient& c) {
  return json{{"value", round3(c.value)},
              {"t", round3(c.t_statistic)},
              {"significant", c.significant_5pct}};
}

json test_json(const TestResult& t) {
  json j{{"statistic", round3(t.statistic)},
         {"p_value", t.p_value},
         {"distribution", t.distribution.label()},
         {"significant", t.significant_5pct},
         {"null_hypothesis", t.null_hypothesis}};
  if (!t.flags.empty()) j["flags"] = t.flags;
  return j;
}

}  // namespace

void apply_config_overrides(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "input") config.input_path = value;
    else if (key == "out") config.out_dir = value;
    else if (key == "entity-col") config.schema.entity_column = value;
    else if (key == "period-col") config.schema.period_column = value;
    else if (key == "output-col") {
      config.schema.variable_columns["output"] = value;
      config.explicit_variables.insert("output");
    } else if (key == "employment-col") {
      config.schema.variable_columns["employment"] = value;
      config.explicit_variables.insert("employment");
    } else if (key == "productivity-col") {
      config.schema.variable_columns["productivity"] = value;
      config.explicit_variables.insert("productivity");
    }
    else if (key == "industry-col") {
      config.industry_column = value;
      config.industry_column_explicit = true;
    } else if (key == "industries") {
      config.industries.clear();
      std::istringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) config.industries.push_back(t);
      }
    } else if (key == "from") config.from_period = static_cast<int>(std::strtol(value.c_str(), nullptr, 10));
    else if (key == "to") config.to_period = static_cast<int>(std::strtol(value.c_str(), nullptr, 10));
    else if (key == "estimators") {
      config.estimators.clear();
      std::istringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) config.estimators.push_back(parse_method(t));
      }
    } else if (key == "dpd-max-lags")
      config.dpd.max_instrument_lags = static_cast<int>(std::strtol(value.c_str(), nullptr, 10));
    else if (key == "dpd-lagged-dependent")
      config.dpd.include_lagged_dependent = (value == "true" || value == "1");
    else if (key == "lag-policy") {
      if (value == "escalate") config.lag_policy = LagPolicy::escalate();
      else if (value.rfind("fixed:", 0) == 0)
        config.lag_policy = LagPolicy::fixed(static_cast<int>(
            std::strtol(value.c_str() + 6, nullptr, 10)));
      else throw ConfigError("config: lag-policy must be 'escalate' or 'fixed:<k>'");
    } else if (key == "growth") {
      if (value == "log") config.growth = GrowthType::LogDifference;
      else if (value == "pct") config.growth = GrowthType::PercentChange;
      else throw ConfigError("config: growth must be 'log' or 'pct'");
    } else if (key == "formats") {
      config.formats.clear();
      std::istringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t == "text") config.formats.insert(OutputFormat::Text);
        else if (t == "csv") config.formats.insert(OutputFormat::Csv);
        else if (t == "jsonl") config.formats.insert(OutputFormat::JsonLines);
        else if (!t.empty()) throw ConfigError("config: unknown format '" + t + "'");
      }
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                        key + "'");
    }
  }
  if (config.from_period > config.to_period)
    throw ConfigError("empty period window: from > to");
}

int cmd_fit(const RunConfig& config) {
  if (config.estimators.empty()) {
    std::cerr << "fit: no estimators selected\n";
    return kExitUsage;
  }
  if (config.from_period > config.to_period) {
    std::cerr << "fit: empty period window\n";
    return kExitUsage;
  }
  try {
    auto loaded = load_industries(config);
    std::vector<FitBlock> blocks;
    std::vector<std::string> skipped = loaded.skipped;
    std::vector<json> json_lines;

    for (const auto& [industry, raw] : loaded.groups) {
      Diagnostics diag;
      const PanelDataset ds = derive_productivity(raw, &diag);
      const GrowthPanel gp = to_growth_panel(ds, config.growth, &diag);
      if (gp.usable_observations() == 0) {
        skipped.push_back(industry + ": no usable growth observations");
        continue;
      }

      FitBlock block;
      block.industry = industry;

      std::map<Method, EstimateResult> results;
      for (Method m : config.estimators) {
        try {
          results.emplace(m, estimate(m, gp, config.dpd));
        } catch (const Error& e) {
          block.notes.push_back(method_label(m) + " skipped: " + e.what());
        }
      }
      if (results.empty()) {
        skipped.push_back(industry + ": every selected estimator failed");
        continue;
      }

      std::optional<TestResult> fe_vs_ols, re_vs_ols, hausman;
      std::optional<double> corr_ui;
      const auto fe = results.find(Method::FE);
      const auto ols = results.find(Method::OLS);
      const auto re = results.find(Method::RE);
      try {
        if (fe != results.end() && ols != results.end())
          fe_vs_ols = test_fe_vs_ols(fe->second, ols->second);
        if (ols != results.end()) re_vs_ols = test_re_vs_ols(gp, ols->second);
        if (fe != results.end() && re != results.end())
          hausman = test_hausman(fe->second, re->second);
        if (fe != results.end()) corr_ui = corr_effects_regressors(fe->second, gp);
      } catch (const Error& e) {
        block.notes.push_back(std::string("specification tests skipped: ") + e.what());
      }

      for (Method m : {Method::FE, Method::RE, Method::OLS, Method::DPD}) {
        const auto it = results.find(m);
        if (it == results.end()) continue;
        const auto& res = it->second;
        const bool is_fe = m == Method::FE;
        const bool is_re = m == Method::RE;
        block.rows.push_back(make_fit_row(
            res, is_fe ? fe_vs_ols : std::nullopt, is_fe ? corr_ui : std::nullopt,
            is_re ? re_vs_ols : std::nullopt, is_re ? hausman : std::nullopt));
        for (const auto& note : res.notes)
          block.notes.push_back(method_label(m) + ": " + note);

        json j{{"industry", industry},
               {"method", method_label(m)},
               {"const", coefficient_json(res.intercept)},
               {"coef", coefficient_json(res.slope)},
               {"model_test", test_json(res.model_test)},
               {"n_obs", res.n_observations}};
        j["r_squared"] = m == Method::OLS
                             ? (res.r_squared_overall ? json(round3(*res.r_squared_overall))
                                                      : json(nullptr))
                             : (m != Method::DPD && res.r_squared_within
                                    ? json(round3(*res.r_squared_within))
                                    : json(nullptr));
        j["n_instruments"] = res.n_instruments ? json(*res.n_instruments) : json(nullptr);
        if (is_fe) {
          j["f_fe_ols"] = fe_vs_ols ? test_json(*fe_vs_ols) : json(nullptr);
          j["corr_ui"] = corr_ui ? json(round3(*corr_ui)) : json(nullptr);
        }
        if (is_re) {
          j["lm_re_ols"] = re_vs_ols ? test_json(*re_vs_ols) : json(nullptr);
          j["hausman"] = hausman ? test_json(*hausman) : json(nullptr);
        }
        if (res.lagged_dependent)
          j["lagged_dependent"] = coefficient_json(*res.lagged_dependent);
        json_lines.push_back(std::move(j));
      }
      blocks.push_back(std::move(block));

      for (const auto& d : diag) blocks.back().notes.push_back(d);
    }

    const std::string stem =
        "fit_" + std::to_string(loaded.from) + "-" + std::to_string(loaded.to);
    if (config.formats.count(OutputFormat::Text)) {
      auto out = open_output(config.out_dir, stem + ".txt");
      out << render_fit_text(blocks, skipped);
    }
    if (config.formats.count(OutputFormat::Csv)) {
      auto out = open_output(config.out_dir, stem + ".csv");
      out << render_fit_csv(blocks);
    }
    if (config.formats.count(OutputFormat::JsonLines)) {
      auto out = open_output(config.out_dir, stem + ".jsonl");
      for (const auto& j : json_lines) out << j.dump() << "\n";
    }

    bool any_estimator_skip = false;
    for (const auto& b : blocks)
      for (const auto& n : b.notes)
        if (n.find("skipped") != std::string::npos) any_estimator_skip = true;
    return (skipped.empty() && !any_estimator_skip) ? kExitClean : kExitSkips;
  } catch (const ConfigError& e) {
    std::cerr << "fit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "fit: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_unitroot(const RunConfig& config) {
  try {
    auto loaded = load_industries(config);
    std::vector<UnitRootBlock> blocks;
    std::vector<std::string> skipped = loaded.skipped;
    std::vector<json> json_lines;

    for (const auto& [industry, raw] : loaded.groups) {
      Diagnostics diag;
      const PanelDataset ds = derive_productivity(raw, &diag);
      const GrowthPanel gp = to_growth_panel(ds, config.growth, &diag);
      if (gp.usable_observations() == 0) {
        skipped.push_back(industry + ": no usable growth observations");
        continue;
      }
      UnitRootBlock block;
      block.industry = industry;
      block.p_report = unit_root_report(gp, GrowthVariable::P, config.lag_policy);
      block.q_report = unit_root_report(gp, GrowthVariable::Q, config.lag_policy);
      if (!block.p_report->combination || !block.q_report->combination)
        skipped.push_back(industry + ": too few usable entities for the combination");

      for (const auto* rep : {&*block.p_report, &*block.q_report}) {
        const char* var = rep->variable == GrowthVariable::P ? "p" : "q";
        json j{{"industry", industry},
               {"variable", var},
               {"lag_policy", config.lag_policy.label()},
               {"lag_superscript", std::string(1, rep->lag_superscript)}};
        json entities = json::array();
        for (const auto& s : rep->entity_stats)
          entities.push_back(json{{"entity", s.entity},
                                  {"t_statistic", round3(s.t_statistic)},
                                  {"lags_used", s.lags_used},
                                  {"p_value", s.p_value},
                                  {"p_clamped", s.p_clamped}});
        j["entities"] = entities;
        if (rep->combination) {
          auto fisher = [&](const FisherStat& f) {
            return json{{"statistic", round3(f.statistic)},
                        {"p_value", f.p_value},
                        {"distribution", f.distribution.label()},
                        {"significant", f.significant_5pct}};
          };
          j["inverse_chi_squared_P"] = fisher(rep->combination->inverse_chi_squared_p);
          j["inverse_normal_Z"] = fisher(rep->combination->inverse_normal_z);
          j["inverse_logit_L_star"] = fisher(rep->combination->inverse_logit_l_star);
        } else {
          j["combination"] = nullptr;
        }
        if (!rep->exclusions.empty()) j["exclusions"] = rep->exclusions;
        json_lines.push_back(std::move(j));
      }
      blocks.push_back(std::move(block));
    }

    const std::string stem =
        "unitroot_" + std::to_string(loaded.from) + "-" + std::to_string(loaded.to);
    if (config.formats.count(OutputFormat::Text)) {
      auto out = open_output(config.out_dir, stem + ".txt");
      out << render_unitroot_text(blocks, skipped);
    }
    if (config.formats.count(OutputFormat::Csv)) {
      auto out = open_output(config.out_dir, stem + ".csv");
      out << render_unitroot_csv(blocks);
    }
    if (config.formats.count(OutputFormat::JsonLines)) {
      auto out = open_output(config.out_dir, stem + ".jsonl");
      for (const auto& j : json_lines) out << j.dump() << "\n";
    }
    return skipped.empty() ? kExitClean : kExitSkips;
  } catch (const ConfigError& e) {
    std::cerr << "unitroot: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "unitroot: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_scatter(const RunConfig& config) {
  try {
    auto loaded = load_industries(config);
    std::vector<std::string> skipped = loaded.skipped;
    for (const auto& [industry, raw] : loaded.groups) {
      Diagnostics diag;
      const PanelDataset ds = derive_productivity(raw, &diag);
      const GrowthPanel gp = to_growth_panel(ds, config.growth, &diag);
      if (gp.usable_observations() == 0) {
        skipped.push_back(industry + ": no usable growth observations");
        continue;
      }
      auto out = open_output(config.out_dir,
                             "scatter_" + slug(industry) + "_" +
                                 std::to_string(loaded.from) + "-" +
                                 std::to_string(loaded.to) + ".csv");
      emit_scatter_csv(gp, out);
    }
    if (!skipped.empty()) {
      for (const auto& s : skipped) std::cerr << "scatter: skipped " << s << "\n";
      return kExitSkips;
    }
    return kExitClean;
  } catch (const ConfigError& e) {
    std::cerr << "scatter: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "scatter: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_simulate(const std::string& study_path, const std::string& out_dir) {
  try {
    const StudyConfig cfg = load_study_config_file(study_path);
    const McSummary summary = run_study(cfg.dgp, cfg.estimator, cfg.replications, cfg.dpd);

    std::string stem = std::filesystem::path(study_path).stem().string();
    if (stem.empty()) stem = "study";
    auto out = open_output(out_dir, stem + "_summary.csv");
    write_summary_csv(out, cfg, summary);
    write_summary_csv(std::cout, cfg, summary);
    return kExitClean;
  } catch (const ConfigError& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace verdoorn
