#pragma once

#include <optional>
#include <string>
#include <vector>

#include "verdoorn/estimators.hpp"
#include "verdoorn/spec_tests.hpp"
#include "verdoorn/unit_root.hpp"

namespace verdoorn {

// Fixed 3-decimal rendering with '.' decimal point; "-0.000" normalizes
// to "0.000".
std::string format_fixed3(double value);

// "0.675* (8.910)" — the coefficient cell: value, star at 5%, t in
// parentheses.
std::string format_coefficient_cell(double value, double t_statistic, bool significant);

// "16.107*" — a bare statistic cell with its significance star.
std::string format_statistic_cell(double value, bool significant);

inline constexpr const char* kEmptyCell = "-----";

// One estimator row of a fit block, already rendered to cells.
struct FitRow {
  std::string label;                 // FE¹¹ / RE¹² / OLS / DPD¹³
  std::vector<std::string> cells;    // 10 columns
};

struct FitBlock {
  std::string industry;
  std::vector<FitRow> rows;
  std::vector<std::string> notes;    // estimator skips, clamp notes
};

// Assembles the ten-column row for one estimator, attaching the relevant
// specification tests to the FE and RE rows.
FitRow make_fit_row(const EstimateResult& result,
                    const std::optional<TestResult>& fe_vs_ols,
                    const std::optional<double>& corr_ui,
                    const std::optional<TestResult>& re_vs_ols,
                    const std::optional<TestResult>& hausman);

extern const std::vector<std::string> kFitColumnHeaders;

std::string render_fit_text(const std::vector<FitBlock>& blocks,
                            const std::vector<std::string>& skipped);
std::string render_fit_csv(const std::vector<FitBlock>& blocks);

struct UnitRootBlock {
  std::string industry;
  std::optional<UnitRootReport> p_report;
  std::optional<UnitRootReport> q_report;
  std::vector<std::string> notes;
};

std::string render_unitroot_text(const std::vector<UnitRootBlock>& blocks,
                                 const std::vector<std::string>& skipped);
std::string render_unitroot_csv(const std::vector<UnitRootBlock>& blocks);

// Number of Unicode code points; table columns align on code points, not
// bytes, because headers carry superscript digits.
std::size_t utf8_length(const std::string& s);

}  // namespace verdoorn
