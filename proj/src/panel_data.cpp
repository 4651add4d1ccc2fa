#include "verdoorn/panel_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace verdoorn {

namespace {

// Minimal RFC-4180-style row reader: quoted fields, doubled quotes, CRLF.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(field);
  return true;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_cell(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::size_t PanelDataset::complete_count() const {
  std::size_t n = 0;
  for (const auto& [key, values] : observations_) {
    bool complete = true;
    for (const auto& var : variables_)
      if (!values.count(var)) {
        complete = false;
        break;
      }
    if (complete) ++n;
  }
  return n;
}

bool PanelDataset::has_slot(const std::string& entity, int period) const {
  return observations_.count({entity, period}) > 0;
}

std::optional<double> PanelDataset::value(const std::string& entity, int period,
                                          const std::string& variable) const {
  auto it = observations_.find({entity, period});
  if (it == observations_.end()) return std::nullopt;
  auto vit = it->second.find(variable);
  if (vit == it->second.end()) return std::nullopt;
  return vit->second;
}

void PanelDataset::declare_variable(const std::string& name) {
  if (std::find(variables_.begin(), variables_.end(), name) == variables_.end())
    variables_.push_back(name);
}

void PanelDataset::add_observation(const std::string& entity, int period,
                                   std::map<std::string, double> values) {
  const auto key = std::make_pair(entity, period);
  if (observations_.count(key))
    throw DataError("duplicate (" + entity + ", " + std::to_string(period) + ") observation");
  for (const auto& [var, v] : values) {
    if (!std::isfinite(v))
      throw DataError("non-finite value for " + var + " at (" + entity + ", " +
                      std::to_string(period) + ")");
    declare_variable(var);
  }
  if (std::find(entities_.begin(), entities_.end(), entity) == entities_.end())
    entities_.push_back(entity);
  auto pit = std::lower_bound(periods_.begin(), periods_.end(), period);
  if (pit == periods_.end() || *pit != period) periods_.insert(pit, period);
  observations_.emplace(key, std::move(values));
}

void PanelDataset::set_value(const std::string& entity, int period,
                             const std::string& variable, double value) {
  auto it = observations_.find({entity, period});
  if (it == observations_.end())
    throw DataError("no slot at (" + entity + ", " + std::to_string(period) + ")");
  declare_variable(variable);
  it->second[variable] = value;
}

void PanelDataset::clear_value(const std::string& entity, int period,
                               const std::string& variable) {
  auto it = observations_.find({entity, period});
  if (it != observations_.end()) it->second.erase(variable);
}

PanelDataset PanelDataset::restrict_periods(int from, int to) const {
  PanelDataset out;
  for (const auto& var : variables_) out.declare_variable(var);
  for (const auto& entity : entities_) {
    for (int period : periods_) {
      if (period < from || period > to) continue;
      auto it = observations_.find({entity, period});
      if (it != observations_.end()) out.add_observation(entity, period, it->second);
    }
  }
  return out;
}

std::vector<std::pair<std::string, PanelDataset>> load_panel_csv_grouped(
    std::istream& in, const CsvSchema& schema, const std::string& group_column,
    bool require_group_column) {
  std::vector<std::string> header;
  if (!read_csv_record(in, header)) throw DataError("empty CSV input: header row required");
  for (auto& h : header) h = trim(h);

  auto column_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError("schema names column '" + name + "' which is not in the CSV header");
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t entity_col = column_of(schema.entity_column);
  const std::size_t period_col = column_of(schema.period_column);
  std::vector<std::pair<std::string, std::size_t>> var_cols;
  for (const auto& [canonical, csv_name] : schema.variable_columns)
    var_cols.emplace_back(canonical, column_of(csv_name));

  std::size_t group_col = header.size();  // sentinel: no grouping
  if (!group_column.empty()) {
    auto it = std::find(header.begin(), header.end(), group_column);
    if (it != header.end())
      group_col = static_cast<std::size_t>(it - header.begin());
    else if (require_group_column)
      throw DataError("grouping column '" + group_column + "' is not in the CSV header");
  }

  std::vector<std::string> group_order;
  std::map<std::string, PanelDataset> groups;
  auto group_of = [&](const std::vector<std::string>& fields) -> PanelDataset& {
    const std::string key = group_col < header.size() ? trim(fields[group_col]) : "all";
    auto it = groups.find(key);
    if (it == groups.end()) {
      group_order.push_back(key);
      it = groups.emplace(key, PanelDataset{}).first;
      for (const auto& [canonical, col] : var_cols) it->second.declare_variable(canonical);
    }
    return it->second;
  };

  std::vector<std::string> fields;
  std::size_t line = 1;
  while (read_csv_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != header.size())
      throw DataError("CSV line " + std::to_string(line) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    const std::string entity = trim(fields[entity_col]);
    if (entity.empty()) throw DataError("CSV line " + std::to_string(line) + ": empty entity");
    const auto period_value = parse_cell(fields[period_col]);
    if (!period_value || *period_value != std::floor(*period_value))
      throw DataError("CSV line " + std::to_string(line) + ": period must be an integer");
    const int period = static_cast<int>(*period_value);

    std::map<std::string, double> values;
    for (const auto& [canonical, col] : var_cols) {
      const auto v = parse_cell(fields[col]);
      if (v) values[canonical] = *v;
    }
    group_of(fields).add_observation(entity, period, std::move(values));
  }

  std::vector<std::pair<std::string, PanelDataset>> out;
  out.reserve(group_order.size());
  for (const auto& key : group_order) out.emplace_back(key, std::move(groups[key]));
  return out;
}

PanelDataset load_panel_csv(std::istream& in, const CsvSchema& schema) {
  auto groups = load_panel_csv_grouped(in, schema, "");
  if (groups.empty()) return PanelDataset{};
  return std::move(groups.front().second);
}

std::vector<std::string> read_csv_header(std::istream& in) {
  std::vector<std::string> header;
  if (!read_csv_record(in, header)) throw DataError("empty CSV input: header row required");
  for (auto& h : header) h = trim(h);
  return header;
}

PanelDataset load_panel_csv_file(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file: " + path);
  return load_panel_csv(in, schema);
}

PanelDataset derive_productivity(const PanelDataset& ds, Diagnostics* diagnostics) {
  PanelDataset out = ds;
  out.declare_variable("productivity");
  for (const auto& entity : ds.entities()) {
    for (int period : ds.periods()) {
      if (!ds.has_slot(entity, period)) continue;
      if (ds.value(entity, period, "productivity")) continue;
      const auto output = ds.value(entity, period, "output");
      const auto employment = ds.value(entity, period, "employment");
      if (!output || !employment) continue;
      if (*employment <= 0.0) {
        if (diagnostics)
          diagnostics->push_back("(" + entity + ", " + std::to_string(period) +
                                 "): non-positive employment, productivity left missing");
        continue;
      }
      out.set_value(entity, period, "productivity", *output / *employment);
    }
  }
  return out;
}

GrowthPanel::GrowthPanel(std::vector<GrowthRow> rows, Diagnostics* diagnostics) {
  // Group by entity in first-seen order, periods ascending inside a group.
  std::vector<std::string> order;
  std::map<std::string, std::vector<GrowthRow>> grouped;
  for (auto& r : rows) {
    if (!grouped.count(r.entity)) order.push_back(r.entity);
    grouped[r.entity].push_back(std::move(r));
  }
  for (const auto& entity : order) {
    auto& group = grouped[entity];
    std::sort(group.begin(), group.end(),
              [](const GrowthRow& a, const GrowthRow& b) { return a.period < b.period; });
    if (group.size() < 2) {
      if (diagnostics)
        diagnostics->push_back(entity + ": fewer than 2 usable growth rows, entity excluded");
      continue;
    }
    const std::size_t begin = rows_.size();
    for (auto& r : group) rows_.push_back(std::move(r));
    spans_[entity] = {begin, rows_.size()};
    entities_.push_back(entity);
  }
}

std::span<const GrowthRow> GrowthPanel::entity_rows(const std::string& entity) const {
  auto it = spans_.find(entity);
  if (it == spans_.end()) return {};
  return {rows_.data() + it->second.first, it->second.second - it->second.first};
}

GrowthPanel to_growth_panel(const PanelDataset& ds, GrowthType type,
                            Diagnostics* diagnostics) {
  std::vector<GrowthRow> rows;
  for (const auto& entity : ds.entities()) {
    for (int period : ds.periods()) {
      const int prev = period - 1;
      const auto prod0 = ds.value(entity, prev, "productivity");
      const auto prod1 = ds.value(entity, period, "productivity");
      const auto out0 = ds.value(entity, prev, "output");
      const auto out1 = ds.value(entity, period, "output");
      if (!prod0 || !prod1 || !out0 || !out1) continue;
      if (*prod0 <= 0.0 || *prod1 <= 0.0 || *out0 <= 0.0 || *out1 <= 0.0) {
        if (diagnostics)
          diagnostics->push_back("(" + entity + ", " + std::to_string(period) +
                                 "): non-positive level value, transition excluded");
        continue;
      }
      GrowthRow r;
      r.entity = entity;
      r.period = period;
      if (type == GrowthType::LogDifference) {
        r.p = std::log(*prod1) - std::log(*prod0);
        r.q = std::log(*out1) - std::log(*out0);
      } else {
        r.p = (*prod1 - *prod0) / *prod0;
        r.q = (*out1 - *out0) / *out0;
      }
      rows.push_back(std::move(r));
    }
  }
  return GrowthPanel(std::move(rows), diagnostics);
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += "\"\"";
    else quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

void emit_scatter_csv(const GrowthPanel& gp, std::ostream& out) {
  out << "entity,period,q,p\n";
  char buf[64];
  for (const auto& r : gp.rows()) {
    out << csv_quote(r.entity) << ',' << r.period << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.q);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.p);
    out << buf << '\n';
  }
}

}  // namespace verdoorn
