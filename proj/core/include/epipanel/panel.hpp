#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "epipanel/date.hpp"
#include "epipanel/series.hpp"

namespace epipanel {

// Long-format unit-by-day panel on one contiguous global daily calendar.
// Storage is dense: every series has n_units * n_days entries laid out
// unit-major, so per-unit windows are contiguous. Units missing a day simply
// carry a missing marker there (unbalanced panels allowed).
class PanelDataset {
 public:
  PanelDataset() = default;
  PanelDataset(std::vector<std::string> unit_ids, Date start_date, int n_days);

  int n_units() const { return static_cast<int>(units_.size()); }
  int n_days() const { return n_days_; }
  std::size_t n_rows() const {
    return static_cast<std::size_t>(n_units()) * static_cast<std::size_t>(n_days_);
  }
  PanelShape shape() const { return {n_units(), n_days_}; }

  const std::vector<std::string>& unit_ids() const { return units_; }
  const std::string& unit_id(int u) const { return units_[u]; }
  // -1 when unknown.
  int unit_index(const std::string& id) const;

  Date start_date() const { return start_; }
  Date date_at(int d) const { return start_.plus_days(d); }
  // Day offset of `date` in the calendar, or -1 if outside it.
  int day_index(Date date) const;

  std::size_t row_index(int u, int d) const {
    return static_cast<std::size_t>(u) * n_days_ + d;
  }

  bool has_series(const std::string& name) const;
  const Series& series(const std::string& name) const;
  std::span<const double> unit_slice(const std::string& name, int u) const;
  void add_series(const std::string& name, Series values);

  const std::vector<std::string>& series_names() const { return series_order_; }

  bool has_unit_attr(const std::string& name) const;
  // One categorical value per unit; empty string marks a missing attribute.
  const std::vector<std::string>& unit_attr(const std::string& name) const;
  void add_unit_attr(const std::string& name, std::vector<std::string> values);
  const std::vector<std::string>& unit_attr_names() const { return attr_order_; }

  // Dense integer codes for one unit attribute (cluster map, FE factors).
  // Rows for units with a missing attribute get code -1.
  struct AttrCodes {
    std::vector<int> code_per_unit;
    std::vector<std::string> levels;
  };
  AttrCodes attr_codes(const std::string& name) const;

 private:
  std::vector<std::string> units_;
  std::unordered_map<std::string, int> unit_index_;
  Date start_;
  int n_days_ = 0;
  std::map<std::string, Series> series_;
  std::vector<std::string> series_order_;
  std::map<std::string, std::vector<std::string>> unit_attrs_;
  std::vector<std::string> attr_order_;
};

// Column-role mapping for load_csv. Any column not named here is read as a
// value series.
struct CsvSchema {
  std::string unit_col = "unit";
  std::string date_col = "date";
  // When non-empty, only these value columns are loaded.
  std::vector<std::string> value_cols;
  // Columns to attach as per-unit attributes (must be constant within unit).
  std::vector<std::string> attr_cols;
};

PanelDataset load_csv(const std::string& path, const CsvSchema& schema = {});

// Inverse of load_csv for well-formed datasets: long format, one row per
// (unit, day) that has at least one nonmissing value; attrs repeated per row.
void save_csv(const PanelDataset& dataset, const std::string& path);

}  // namespace epipanel
