#include "verdoorn/report.hpp"

#include <array>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "verdoorn/panel_data.hpp"

namespace verdoorn {

std::string format_fixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string format_coefficient_cell(double value, double t_statistic, bool significant) {
  std::string s = format_fixed3(value);
  if (significant) s += "*";
  s += " (" + format_fixed3(t_statistic) + ")";
  return s;
}

std::string format_statistic_cell(double value, bool significant) {
  std::string s = format_fixed3(value);
  if (significant) s += "*";
  return s;
}

const std::vector<std::string> kFitColumnHeaders = {
    "Const.¹",        "Coef.²",       "F/Wald(mod.)³",
    "F(Fe_OLS)⁴",     "Corr(u_i)⁵",   "F(Re_OLS)⁶",
    "Hausman⁷",       "R²⁸",     "N.O.⁹",
    "N.I.¹⁰"};

FitRow make_fit_row(const EstimateResult& result,
                    const std::optional<TestResult>& fe_vs_ols,
                    const std::optional<double>& corr_ui,
                    const std::optional<TestResult>& re_vs_ols,
                    const std::optional<TestResult>& hausman) {
  FitRow row;
  switch (result.method) {
    case Method::FE: row.label = "FE¹¹"; break;
    case Method::RE: row.label = "RE¹²"; break;
    case Method::OLS: row.label = "OLS"; break;
    case Method::DPD: row.label = "DPD¹³"; break;
  }
  auto stat_cell = [](const std::optional<TestResult>& t) {
    return t ? format_statistic_cell(t->statistic, t->significant_5pct)
             : std::string(kEmptyCell);
  };

  row.cells.push_back(format_coefficient_cell(result.intercept.value,
                                              result.intercept.t_statistic,
                                              result.intercept.significant_5pct));
  row.cells.push_back(format_coefficient_cell(result.slope.value,
                                              result.slope.t_statistic,
                                              result.slope.significant_5pct));
  row.cells.push_back(format_statistic_cell(result.model_test.statistic,
                                            result.model_test.significant_5pct));
  row.cells.push_back(stat_cell(fe_vs_ols));
  row.cells.push_back(corr_ui ? format_fixed3(*corr_ui) : std::string(kEmptyCell));
  row.cells.push_back(stat_cell(re_vs_ols));
  row.cells.push_back(stat_cell(hausman));

  // The headline R²: within for FE and RE, overall for OLS, none for DPD.
  std::optional<double> r2;
  if (result.method == Method::OLS) r2 = result.r_squared_overall;
  else if (result.method != Method::DPD) r2 = result.r_squared_within;
  row.cells.push_back(r2 ? format_fixed3(*r2) : std::string(kEmptyCell));

  row.cells.push_back(std::to_string(result.n_observations));
  row.cells.push_back(result.n_instruments ? std::to_string(*result.n_instruments)
                                           : std::string(kEmptyCell));
  return row;
}

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

namespace {

std::string pad_to(const std::string& s, std::size_t width) {
  std::string out = s;
  const std::size_t len = utf8_length(s);
  if (len < width) out.append(width - len, ' ');
  return out;
}

// Lines are built by padded concatenation; the last cell leaves no tail.
void append_line(std::ostringstream& out, std::string line) {
  while (!line.empty() && line.back() == ' ') line.pop_back();
  out << line << "\n";
}

void append_legend(std::ostringstream& out) {
  out << "Note: 1 constant; 2 slope coefficient; 3 model F (FE, OLS) or Wald (RE, DPD);\n"
         "4 F test of fixed effects against pooled OLS; 5 correlation between entity\n"
         "effects and fitted slope component; 6 Breusch-Pagan LM test of random effects\n"
         "against pooled OLS; 7 Hausman test (null: GLS consistent); 8 R squared (within\n"
         "for FE/RE, overall for OLS); 9 observations; 10 instruments; 11 fixed effects;\n"
         "12 random effects; 13 dynamic panel GMM; * significant at 5%.\n";
}

}  // namespace

std::string render_fit_text(const std::vector<FitBlock>& blocks,
                            const std::vector<std::string>& skipped) {
  // Column widths are the maxima over every block, so all blocks align.
  const std::size_t n_cols = kFitColumnHeaders.size();
  std::size_t label_width = 3;
  std::vector<std::size_t> widths(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) widths[c] = utf8_length(kFitColumnHeaders[c]);
  for (const auto& b : blocks)
    for (const auto& r : b.rows) {
      label_width = std::max(label_width, utf8_length(r.label));
      for (std::size_t c = 0; c < n_cols && c < r.cells.size(); ++c)
        widths[c] = std::max(widths[c], utf8_length(r.cells[c]));
    }

  std::ostringstream out;
  bool first = true;
  for (const auto& b : blocks) {
    if (!first) out << "\n";
    first = false;
    out << b.industry << "\n";
    std::string header_line = pad_to("", label_width);
    for (std::size_t c = 0; c < n_cols; ++c)
      header_line += "  " + pad_to(kFitColumnHeaders[c], widths[c]);
    append_line(out, std::move(header_line));
    for (const auto& r : b.rows) {
      std::string line = pad_to(r.label, label_width);
      for (std::size_t c = 0; c < n_cols; ++c)
        line += "  " + pad_to(c < r.cells.size() ? r.cells[c] : kEmptyCell, widths[c]);
      append_line(out, std::move(line));
    }
    for (const auto& note : b.notes) out << "  note: " << note << "\n";
  }
  if (!blocks.empty()) {
    out << "\n";
    append_legend(out);
  }
  if (!skipped.empty()) {
    out << "\nSkipped industries:\n";
    for (const auto& s : skipped) out << "  " << s << "\n";
  }
  return out.str();
}

std::string render_fit_csv(const std::vector<FitBlock>& blocks) {
  std::ostringstream out;
  out << "industry,method,const,const_t,const_sig,coef,coef_t,coef_sig,model_test,"
         "model_test_sig,f_fe_ols,corr_ui,lm_re_ols,hausman,r_squared,n_obs,n_instruments\n";
  auto strip = [](const std::string& cell) {
    // Splits "0.675* (8.910)" into value, t, star for the CSV mirror.
    std::string value, t;
    bool sig = false;
    std::size_t i = 0;
    while (i < cell.size() && cell[i] != ' ' && cell[i] != '*') value += cell[i++];
    if (i < cell.size() && cell[i] == '*') {
      sig = true;
      ++i;
    }
    while (i < cell.size() && (cell[i] == ' ' || cell[i] == '(')) ++i;
    while (i < cell.size() && cell[i] != ')') t += cell[i++];
    return std::tuple<std::string, std::string, bool>(value, t, sig);
  };
  for (const auto& b : blocks) {
    for (const auto& r : b.rows) {
      // Row labels carry superscript digits; the method name is the ASCII prefix.
      std::string method;
      for (char ch : r.label) {
        if (static_cast<unsigned char>(ch) < 0x80) method += ch;
        else break;
      }
      const auto [cv, ct, cs] = strip(r.cells[0]);
      const auto [bv, bt, bs] = strip(r.cells[1]);
      const auto [mv, mt, ms] = strip(r.cells[2]);
      auto bare = [&strip](const std::string& cell) {
        if (cell == kEmptyCell) return std::string();
        auto [v, t, s] = strip(cell);
        return v + (s ? "*" : "");
      };
      out << csv_quote(b.industry) << ',' << method << ',' << cv << ',' << ct << ','
          << (cs ? 1 : 0) << ',' << bv << ',' << bt << ',' << (bs ? 1 : 0) << ',' << mv
          << ',' << (ms ? 1 : 0) << ',' << bare(r.cells[3]) << ',' << bare(r.cells[4])
          << ',' << bare(r.cells[5]) << ',' << bare(r.cells[6]) << ',' << bare(r.cells[7])
          << ',' << r.cells[8] << ','
          << (r.cells[9] == kEmptyCell ? std::string() : r.cells[9]) << '\n';
    }
  }
  return out.str();
}

namespace {

std::string fisher_cell(const FisherStat& s) {
  return format_statistic_cell(s.statistic, s.significant_5pct);
}

}  // namespace

std::string render_unitroot_text(const std::vector<UnitRootBlock>& blocks,
                                 const std::vector<std::string>& skipped) {
  std::ostringstream out;
  bool first = true;
  for (const auto& b : blocks) {
    if (!first) out << "\n";
    first = false;
    out << b.industry << "\n";
    if (!b.p_report || !b.q_report || !b.p_report->combination ||
        !b.q_report->combination) {
      out << "  excluded: too few usable entities for the combination\n";
      for (const auto& note : b.notes) out << "  note: " << note << "\n";
      continue;
    }
    const auto& p = *b.p_report;
    const auto& q = *b.q_report;
    const std::string p_head = std::string("p^") + p.lag_superscript;
    const std::string q_head = std::string("q^") + q.lag_superscript;

    std::vector<std::array<std::string, 3>> rows = {
        {"Inverse ¹", fisher_cell(p.combination->inverse_chi_squared_p),
         fisher_cell(q.combination->inverse_chi_squared_p)},
        {"Inverse ²", fisher_cell(p.combination->inverse_normal_z),
         fisher_cell(q.combination->inverse_normal_z)},
        {"Inverse ³", fisher_cell(p.combination->inverse_logit_l_star),
         fisher_cell(q.combination->inverse_logit_l_star)}};

    std::size_t w0 = utf8_length(rows[0][0]);
    std::size_t w1 = utf8_length(p_head), w2 = utf8_length(q_head);
    for (const auto& r : rows) {
      w0 = std::max(w0, utf8_length(r[0]));
      w1 = std::max(w1, utf8_length(r[1]));
      w2 = std::max(w2, utf8_length(r[2]));
    }
    append_line(out, pad_to("", w0) + "  " + pad_to(p_head, w1) + "  " + pad_to(q_head, w2));
    for (const auto& r : rows)
      append_line(out, pad_to(r[0], w0) + "  " + pad_to(r[1], w1) + "  " + pad_to(r[2], w2));
    for (const auto& e : p.exclusions) out << "  note (p): " << e << "\n";
    for (const auto& e : q.exclusions) out << "  note (q): " << e << "\n";
    for (const auto& note : b.notes) out << "  note: " << note << "\n";
  }
  if (!blocks.empty()) {
    out << "\n¹ Inverse chi-squared (P); ² Inverse normal (Z); "
           "³ Inverse logit t (L*); ^a one lag; ^b more than one lag; "
           "* significant at 5%.\n";
  }
  if (!skipped.empty()) {
    out << "\nSkipped industries:\n";
    for (const auto& s : skipped) out << "  " << s << "\n";
  }
  return out.str();
}

std::string render_unitroot_csv(const std::vector<UnitRootBlock>& blocks) {
  std::ostringstream out;
  out << "industry,variable,statistic,value,p_value,significant,lag_superscript\n";
  char buf[64];
  for (const auto& b : blocks) {
    for (const auto* rep : {&b.p_report, &b.q_report}) {
      if (!rep->has_value() || !(*rep)->combination) continue;
      const auto& r = **rep;
      const char* var = r.variable == GrowthVariable::P ? "p" : "q";
      auto emit = [&](const char* name, const FisherStat& s) {
        std::snprintf(buf, sizeof buf, "%.6g", s.p_value);
        out << csv_quote(b.industry) << ',' << var << ',' << name << ','
            << format_fixed3(s.statistic) << ',' << buf << ',' << (s.significant_5pct ? 1 : 0)
            << ',' << r.lag_superscript << '\n';
      };
      emit("inverse_chi_squared_P", r.combination->inverse_chi_squared_p);
      emit("inverse_normal_Z", r.combination->inverse_normal_z);
      emit("inverse_logit_L_star", r.combination->inverse_logit_l_star);
    }
  }
  return out.str();
}

}  // namespace verdoorn
