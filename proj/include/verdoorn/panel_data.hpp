#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "verdoorn/error.hpp"

namespace verdoorn {

// Maps canonical variable names onto CSV column headers.
struct CsvSchema {
  std::string entity_column = "entity";
  std::string period_column = "year";
  // canonical name (e.g. "output", "employment", "productivity") -> header
  std::map<std::string, std::string> variable_columns;
};

using Diagnostics = std::vector<std::string>;

// Entity x period observations of named numeric variables. Slots exist for
// every row the source file indexed, even when some variable cells were
// missing, so missingness stays visible instead of silently vanishing.
class PanelDataset {
 public:
  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<int>& periods() const { return periods_; }
  const std::vector<std::string>& variables() const { return variables_; }

  std::size_t observation_count() const { return observations_.size(); }
  std::size_t complete_count() const;

  bool has_slot(const std::string& entity, int period) const;
  std::optional<double> value(const std::string& entity, int period,
                              const std::string& variable) const;

  void declare_variable(const std::string& name);
  // Throws DataError on a duplicate (entity, period) pair. Missing variables
  // are simply absent from `values`.
  void add_observation(const std::string& entity, int period,
                       std::map<std::string, double> values);
  void set_value(const std::string& entity, int period, const std::string& variable,
                 double value);
  void clear_value(const std::string& entity, int period, const std::string& variable);

  // Keeps only observations whose period lies in [from, to].
  PanelDataset restrict_periods(int from, int to) const;

 private:
  std::vector<std::string> entities_;  // first-seen order
  std::vector<int> periods_;           // strictly increasing
  std::vector<std::string> variables_;
  std::map<std::pair<std::string, int>, std::map<std::string, double>> observations_;
};

// Reads a UTF-8 CSV with a header row. Every data row becomes an indexed
// slot; empty or non-numeric variable cells are recorded as missing values.
PanelDataset load_panel_csv(std::istream& in, const CsvSchema& schema);
PanelDataset load_panel_csv_file(const std::string& path, const CsvSchema& schema);

// Same parse, split by the value of `group_column` (first-seen group order).
// An empty or absent group column yields a single group named "all"; pass
// require_group_column to turn its absence into an error instead.
std::vector<std::pair<std::string, PanelDataset>> load_panel_csv_grouped(
    std::istream& in, const CsvSchema& schema, const std::string& group_column,
    bool require_group_column = false);

// Header row of a CSV, trimmed. The stream is consumed up to the first record.
std::vector<std::string> read_csv_header(std::istream& in);

// Fills `productivity` as output / employment wherever it is absent and both
// inputs are present. Non-positive employment invalidates the observation's
// productivity and is reported through `diagnostics`.
PanelDataset derive_productivity(const PanelDataset& ds, Diagnostics* diagnostics = nullptr);

struct GrowthRow {
  std::string entity;
  int period = 0;  // the later period of the transition
  double p = 0.0;  // productivity growth
  double q = 0.0;  // output growth
};

enum class GrowthType { LogDifference, PercentChange };

// Derived panel of (p, q) growth pairs, grouped by entity in first-seen
// order with periods ascending inside each group. Entities contributing
// fewer than two usable rows are dropped at construction and reported.
class GrowthPanel {
 public:
  GrowthPanel() = default;
  explicit GrowthPanel(std::vector<GrowthRow> rows, Diagnostics* diagnostics = nullptr);

  const std::vector<GrowthRow>& rows() const { return rows_; }
  const std::vector<std::string>& entities() const { return entities_; }
  std::size_t entity_count() const { return entities_.size(); }
  std::size_t usable_observations() const { return rows_.size(); }

  // Contiguous row range of one entity.
  std::span<const GrowthRow> entity_rows(const std::string& entity) const;

 private:
  std::vector<GrowthRow> rows_;
  std::vector<std::string> entities_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> spans_;  // entity -> [begin,end)
};

// Builds growth rates from consecutive periods (t-1, t). Period gaps produce
// no row. Non-positive levels exclude the transition with a diagnostic.
GrowthPanel to_growth_panel(const PanelDataset& ds,
                            GrowthType type = GrowthType::LogDifference,
                            Diagnostics* diagnostics = nullptr);

// Writes entity,period,q,p with one line per growth row in panel order.
// Values are printed with enough digits to round-trip exactly.
void emit_scatter_csv(const GrowthPanel& gp, std::ostream& out);

// Quotes a CSV field when it contains separators or quotes.
std::string csv_quote(const std::string& field);

}  // namespace verdoorn
