#include "epipanel/panel.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include "epipanel/csv.hpp"
#include "epipanel/errors.hpp"

namespace epipanel {

PanelDataset::PanelDataset(std::vector<std::string> unit_ids, Date start_date,
                           int n_days)
    : units_(std::move(unit_ids)), start_(start_date), n_days_(n_days) {
  for (int i = 0; i < n_units(); ++i) unit_index_[units_[i]] = i;
}

int PanelDataset::unit_index(const std::string& id) const {
  auto it = unit_index_.find(id);
  return it == unit_index_.end() ? -1 : it->second;
}

int PanelDataset::day_index(Date date) const {
  const auto offset = start_.days_until(date);
  if (offset < 0 || offset >= n_days_) return -1;
  return static_cast<int>(offset);
}

bool PanelDataset::has_series(const std::string& name) const {
  return series_.count(name) != 0;
}

const Series& PanelDataset::series(const std::string& name) const {
  auto it = series_.find(name);
  if (it == series_.end()) throw_error(ErrorCode::UnknownColumn, name);
  return it->second;
}

std::span<const double> PanelDataset::unit_slice(const std::string& name,
                                                 int u) const {
  const Series& s = series(name);
  return {s.data() + row_index(u, 0), static_cast<std::size_t>(n_days_)};
}

void PanelDataset::add_series(const std::string& name, Series values) {
  if (values.size() != n_rows()) {
    throw_error(ErrorCode::ConfigError,
                "series '" + name + "' has " + std::to_string(values.size()) +
                    " rows, dataset has " + std::to_string(n_rows()));
  }
  if (series_.count(name) == 0) series_order_.push_back(name);
  series_[name] = std::move(values);
}

bool PanelDataset::has_unit_attr(const std::string& name) const {
  return unit_attrs_.count(name) != 0;
}

const std::vector<std::string>& PanelDataset::unit_attr(
    const std::string& name) const {
  auto it = unit_attrs_.find(name);
  if (it == unit_attrs_.end()) throw_error(ErrorCode::UnknownColumn, name);
  return it->second;
}

void PanelDataset::add_unit_attr(const std::string& name,
                                 std::vector<std::string> values) {
  if (values.size() != units_.size()) {
    throw_error(ErrorCode::ConfigError,
                "attr '" + name + "' must have one value per unit");
  }
  if (unit_attrs_.count(name) == 0) attr_order_.push_back(name);
  unit_attrs_[name] = std::move(values);
}

PanelDataset::AttrCodes PanelDataset::attr_codes(const std::string& name) const {
  const auto& values = unit_attr(name);
  AttrCodes out;
  out.code_per_unit.resize(values.size(), -1);
  std::map<std::string, int> level_of;
  for (std::size_t u = 0; u < values.size(); ++u) {
    if (values[u].empty()) continue;
    auto [it, inserted] = level_of.emplace(values[u], 0);
    if (inserted) {
      it->second = static_cast<int>(out.levels.size());
      out.levels.push_back(values[u]);
    }
    out.code_per_unit[u] = it->second;
  }
  return out;
}

PanelDataset load_csv(const std::string& path, const CsvSchema& schema) {
  const csv::Table table = csv::read_file(path);

  const int unit_col = table.column(schema.unit_col);
  if (unit_col < 0) throw_error(ErrorCode::MissingColumn, schema.unit_col);
  const int date_col = table.column(schema.date_col);
  if (date_col < 0) throw_error(ErrorCode::MissingColumn, schema.date_col);

  std::vector<std::string> value_names = schema.value_cols;
  if (value_names.empty()) {
    for (const auto& h : table.header) {
      if (h == schema.unit_col || h == schema.date_col) continue;
      if (std::find(schema.attr_cols.begin(), schema.attr_cols.end(), h) !=
          schema.attr_cols.end())
        continue;
      value_names.push_back(h);
    }
  }
  if (value_names.empty()) {
    throw_error(ErrorCode::MissingColumn, "no value columns in " + path);
  }
  std::vector<int> value_cols;
  for (const auto& name : value_names) {
    const int c = table.column(name);
    if (c < 0) throw_error(ErrorCode::MissingColumn, name);
    value_cols.push_back(c);
  }
  std::vector<int> attr_cols;
  for (const auto& name : schema.attr_cols) {
    const int c = table.column(name);
    if (c < 0) throw_error(ErrorCode::MissingColumn, name);
    attr_cols.push_back(c);
  }

  // First pass: unit set in order of appearance, global date range.
  std::vector<std::string> units;
  std::set<std::string> seen_units;
  std::int64_t min_serial = 0, max_serial = 0;
  bool have_dates = false;
  std::vector<std::int64_t> row_serial(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw_error(ErrorCode::NonNumericValue,
                  "row " + std::to_string(r + 2) + " has " +
                      std::to_string(row.size()) + " fields, header has " +
                      std::to_string(table.header.size()));
    }
    const auto date = Date::parse_iso(row[date_col]);
    if (!date) {
      throw_error(ErrorCode::UnparseableDate,
                  "row " + std::to_string(r + 2) + " value '" + row[date_col] + "'");
    }
    row_serial[r] = date->serial();
    if (!have_dates) {
      min_serial = max_serial = date->serial();
      have_dates = true;
    } else {
      min_serial = std::min(min_serial, date->serial());
      max_serial = std::max(max_serial, date->serial());
    }
    if (seen_units.insert(row[unit_col]).second) units.push_back(row[unit_col]);
  }
  if (!have_dates) throw_error(ErrorCode::IoError, "no data rows in " + path);

  const int n_days = static_cast<int>(max_serial - min_serial + 1);
  PanelDataset dataset(std::move(units), Date(min_serial), n_days);

  std::vector<Series> columns(value_cols.size(),
                              Series(dataset.n_rows(), kMissing));
  std::vector<std::vector<std::string>> attrs(
      attr_cols.size(), std::vector<std::string>(dataset.n_units()));
  std::vector<bool> filled(dataset.n_rows(), false);

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int u = dataset.unit_index(row[unit_col]);
    const int d = static_cast<int>(row_serial[r] - min_serial);
    const std::size_t idx = dataset.row_index(u, d);
    if (filled[idx]) {
      throw_error(ErrorCode::DuplicateRow,
                  "(" + row[unit_col] + ", " + Date(row_serial[r]).iso() + ")");
    }
    filled[idx] = true;
    for (std::size_t k = 0; k < value_cols.size(); ++k) {
      const std::string& cell = row[value_cols[k]];
      if (cell.empty()) continue;  // empty cell = missing
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw_error(ErrorCode::NonNumericValue,
                    "row " + std::to_string(r + 2) + " column '" +
                        value_names[k] + "' value '" + cell + "'");
      }
      columns[k][idx] = v;
    }
    for (std::size_t k = 0; k < attr_cols.size(); ++k) {
      attrs[k][u] = row[attr_cols[k]];
    }
  }

  for (std::size_t k = 0; k < value_cols.size(); ++k) {
    dataset.add_series(value_names[k], std::move(columns[k]));
  }
  for (std::size_t k = 0; k < attr_cols.size(); ++k) {
    dataset.add_unit_attr(schema.attr_cols[k], std::move(attrs[k]));
  }
  return dataset;
}

void save_csv(const PanelDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);

  out << "unit,date";
  for (const auto& name : dataset.series_names()) out << "," << csv::escape(name);
  for (const auto& name : dataset.unit_attr_names())
    out << "," << csv::escape(name);
  out << "\n";

  for (int u = 0; u < dataset.n_units(); ++u) {
    for (int d = 0; d < dataset.n_days(); ++d) {
      const std::size_t idx = dataset.row_index(u, d);
      bool any = false;
      for (const auto& name : dataset.series_names()) {
        if (!is_missing(dataset.series(name)[idx])) {
          any = true;
          break;
        }
      }
      if (!any) continue;
      out << csv::escape(dataset.unit_id(u)) << "," << dataset.date_at(d).iso();
      for (const auto& name : dataset.series_names()) {
        out << "," << csv::format_number(dataset.series(name)[idx]);
      }
      for (const auto& name : dataset.unit_attr_names()) {
        out << "," << csv::escape(dataset.unit_attr(name)[u]);
      }
      out << "\n";
    }
  }
}

}  // namespace epipanel
