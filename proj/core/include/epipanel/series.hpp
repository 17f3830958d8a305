#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace epipanel {

// A column of optional reals aligned to (unit, date) rows. Missing entries
// are encoded as quiet NaN; every transform in this project propagates
// missingness rather than imputing.
using Series = std::vector<double>;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

inline std::optional<double> as_optional(double v) {
  if (is_missing(v)) return std::nullopt;
  return v;
}

// Geometry of a dense unit-major panel column.
struct PanelShape {
  int n_units = 0;
  int n_days = 0;
  std::size_t n_rows() const {
    return static_cast<std::size_t>(n_units) * static_cast<std::size_t>(n_days);
  }
};

}  // namespace epipanel
