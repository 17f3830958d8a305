#include "epipanel/did.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "epipanel/errors.hpp"
#include "epipanel/inference.hpp"
#include "epipanel/rng.hpp"

namespace epipanel {

namespace {

// Opening period per unit (floor division of the day offset); nullopt when
// the unit never opens. Units opening outside the calendar still get their
// (possibly negative or beyond-range) period so control logic stays correct.
std::vector<std::optional<int>> opening_periods(const PanelDataset& dataset,
                                                const std::string& attr,
                                                int period_days) {
  const auto& values = dataset.unit_attr(attr);
  std::vector<std::optional<int>> out(values.size());
  for (std::size_t u = 0; u < values.size(); ++u) {
    if (values[u].empty()) continue;
    const auto date = Date::parse_iso(values[u]);
    if (!date) {
      throw_error(ErrorCode::UnparseableDate,
                  "unit " + dataset.unit_id(static_cast<int>(u)) + " attr '" +
                      values[u] + "'");
    }
    const std::int64_t offset = dataset.start_date().days_until(*date);
    const std::int64_t period = offset >= 0
                                    ? offset / period_days
                                    : -((-offset + period_days - 1) / period_days);
    out[u] = static_cast<int>(period);
  }
  return out;
}

}  // namespace

EventStudyResult event_study_fit(const PanelDataset& dataset,
                                 const EventStudySpec& spec) {
  if (spec.lead_weeks < 0 || spec.lag_weeks < 0) {
    throw_error(ErrorCode::ConfigError, "event windows must be nonnegative");
  }
  const Series& outcome = dataset.series(spec.outcome);
  const auto& groups = dataset.unit_attr(spec.group_attr);
  const auto& openings = dataset.unit_attr(spec.opening_attr);

  // Treated units in the subsample; never-treated units always contribute
  // baseline rows.
  std::vector<std::optional<std::int64_t>> open_serial(dataset.n_units());
  std::vector<char> unit_kept(dataset.n_units(), 1);
  std::set<std::string> group_labels;
  for (int u = 0; u < dataset.n_units(); ++u) {
    if (openings[u].empty()) continue;
    const auto date = Date::parse_iso(openings[u]);
    if (!date) {
      throw_error(ErrorCode::UnparseableDate,
                  "unit " + dataset.unit_id(u) + " attr '" + openings[u] + "'");
    }
    if ((spec.band_lo && *date < *spec.band_lo) ||
        (spec.band_hi && *date > *spec.band_hi)) {
      unit_kept[u] = 0;
      continue;
    }
    if (groups[u].empty()) {
      throw_error(ErrorCode::ConfigError,
                  "unit " + dataset.unit_id(u) + " has an opening date but no group");
    }
    open_serial[u] = date->serial();
    group_labels.insert(groups[u]);
  }
  if (group_labels.empty()) {
    throw_error(ErrorCode::EmptyEventCell, "no treated unit in any group");
  }

  const int window = spec.lead_weeks + spec.lag_weeks + 1;
  std::vector<std::string> ordered_groups(group_labels.begin(), group_labels.end());
  std::map<std::string, int> group_index;
  for (std::size_t g = 0; g < ordered_groups.size(); ++g) {
    group_index[ordered_groups[g]] = static_cast<int>(g);
  }
  const long n_dummies = static_cast<long>(ordered_groups.size()) * window;

  // Rows: nonmissing outcome among kept units.
  std::vector<std::int32_t> row_unit, row_day;
  for (int u = 0; u < dataset.n_units(); ++u) {
    if (!unit_kept[u]) continue;
    for (int d = 0; d < dataset.n_days(); ++d) {
      if (is_missing(outcome[dataset.row_index(u, d)])) continue;
      row_unit.push_back(u);
      row_day.push_back(d);
    }
  }
  if (row_unit.empty()) {
    throw_error(ErrorCode::EmptyAfterDeletion, "no usable rows for event study");
  }
  const long n = static_cast<long>(row_unit.size());

  DesignMatrix design;
  design.n_units = dataset.n_units();
  design.n_days = dataset.n_days();
  design.row_unit = row_unit;
  design.row_day = row_day;
  design.y.resize(n);
  design.X = Eigen::MatrixXd::Zero(n, n_dummies);
  std::vector<long> cell_count(n_dummies, 0);
  for (long r = 0; r < n; ++r) {
    const int u = row_unit[r];
    const int d = row_day[r];
    design.y[r] = outcome[dataset.row_index(u, d)];
    if (!open_serial[u]) continue;
    const std::int64_t day_serial = dataset.date_at(d).serial();
    std::int64_t diff = day_serial - *open_serial[u];
    // Floor division to whole event weeks.
    std::int64_t week = diff >= 0 ? diff / 7 : -((-diff + 6) / 7);
    if (week < -spec.lead_weeks || week > spec.lag_weeks) continue;
    const long col = static_cast<long>(group_index[groups[u]]) * window +
                     static_cast<long>(week + spec.lead_weeks);
    design.X(r, col) = 1.0;
    ++cell_count[col];
  }

  for (const auto& label : ordered_groups) {
    for (int w = -spec.lead_weeks; w <= spec.lag_weeks; ++w) {
      design.term_names.push_back(label + ":w" + std::to_string(w));
    }
  }
  for (long c = 0; c < n_dummies; ++c) {
    if (cell_count[c] == 0) {
      throw_error(ErrorCode::EmptyEventCell, design.term_names[c]);
    }
  }

  // Unit FE; clustered by unit.
  std::vector<std::int64_t> raw(n);
  for (long r = 0; r < n; ++r) raw[r] = row_unit[r];
  std::map<std::int64_t, std::int32_t> dense;
  for (auto v : raw) dense.emplace(v, 0);
  std::int32_t next = 0;
  for (auto& [code, id] : dense) id = next++;
  std::vector<std::int32_t> codes(n);
  for (long r = 0; r < n; ++r) codes[r] = dense[raw[r]];
  design.factor_codes.push_back(codes);
  design.factor_levels.push_back(next);
  design.factor_names.push_back("unit");
  design.unit_factor = 0;
  design.cluster_codes = std::move(codes);
  design.n_clusters = next;

  FitOptions options;
  options.demean_tol = spec.demean_tol;
  options.demean_max_iter = spec.demean_max_iter;
  FitResult fit = fit_design(std::move(design), options);

  EventStudyResult result;
  result.cells.reserve(n_dummies);
  long idx = 0;
  for (const auto& label : ordered_groups) {
    for (int w = -spec.lead_weeks; w <= spec.lag_weeks; ++w, ++idx) {
      result.cells.push_back({label, w, fit.coefficients[idx], fit.se[idx],
                              cell_count[idx]});
    }
  }
  result.fit = std::move(fit);
  return result;
}

CsdidResult csdid_att(const PanelDataset& dataset, const CsdidOptions& options) {
  if (options.period_days < 1) {
    throw_error(ErrorCode::ConfigError, "period_days must be >= 1");
  }
  const Series& outcome = dataset.series(options.outcome);
  const auto openings =
      opening_periods(dataset, options.opening_attr, options.period_days);

  const int n_units = dataset.n_units();
  const int n_periods = (dataset.n_days() + options.period_days - 1) /
                        options.period_days;

  // Period-level outcomes: average of nonmissing days within (unit, period).
  std::vector<double> y(static_cast<std::size_t>(n_units) * n_periods, kMissing);
  for (int u = 0; u < n_units; ++u) {
    for (int p = 0; p < n_periods; ++p) {
      double sum = 0.0;
      int count = 0;
      const int d_end = std::min(dataset.n_days(), (p + 1) * options.period_days);
      for (int d = p * options.period_days; d < d_end; ++d) {
        const double v = outcome[dataset.row_index(u, d)];
        if (is_missing(v)) continue;
        sum += v;
        ++count;
      }
      if (count > 0) y[static_cast<std::size_t>(u) * n_periods + p] = sum / count;
    }
  }
  auto y_at = [&](int u, int p) {
    return y[static_cast<std::size_t>(u) * n_periods + p];
  };

  CsdidResult result;
  result.n_units = n_units;
  result.n_periods = n_periods;
  result.period_days = options.period_days;
  result.start = dataset.start_date();
  result.unit_group.assign(n_units, -1);
  std::set<int> groups;
  for (int u = 0; u < n_units; ++u) {
    if (!openings[u]) continue;
    result.unit_group[u] = *openings[u];
    // Groups need an in-sample base period g-1 and at least one post period.
    if (*openings[u] >= 1 && *openings[u] < n_periods) groups.insert(*openings[u]);
  }

  for (int g : groups) {
    for (int t = 0; t < n_periods; ++t) {
      if (t == g - 1) continue;  // base period: identically zero
      // Control: never treated, or first treated after both t and the base.
      const int treated_after = std::max(t, g - 1);
      std::vector<int> treated, control;
      for (int u = 0; u < n_units; ++u) {
        if (is_missing(y_at(u, t)) || is_missing(y_at(u, g - 1))) continue;
        if (result.unit_group[u] == g) {
          treated.push_back(u);
        } else if (result.unit_group[u] < 0 ||
                   result.unit_group[u] > treated_after) {
          control.push_back(u);
        }
      }
      if (treated.empty()) continue;
      if (control.empty()) {
        throw_error(ErrorCode::NoValidControl,
                    "(g=" + std::to_string(g) + ", t=" + std::to_string(t) + ")");
      }

      double treated_mean = 0.0, control_mean = 0.0;
      for (int u : treated) treated_mean += y_at(u, t) - y_at(u, g - 1);
      for (int u : control) control_mean += y_at(u, t) - y_at(u, g - 1);
      treated_mean /= static_cast<double>(treated.size());
      control_mean /= static_cast<double>(control.size());

      GroupTimeATT cell;
      cell.group = g;
      cell.time = t;
      cell.att = treated_mean - control_mean;
      cell.n_treated = static_cast<int>(treated.size());
      cell.n_control = static_cast<int>(control.size());
      cell.low_reliability = cell.n_treated < options.low_reliability_below;
      cell.influence.assign(n_units, 0.0);
      for (int u : treated) {
        const double diff = y_at(u, t) - y_at(u, g - 1);
        cell.influence[u] = (diff - treated_mean) / cell.n_treated;
      }
      for (int u : control) {
        const double diff = y_at(u, t) - y_at(u, g - 1);
        cell.influence[u] = -(diff - control_mean) / cell.n_control;
      }
      double var = 0.0;
      for (double v : cell.influence) var += v * v;
      cell.se = std::sqrt(var);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::vector<DynamicEffect> aggregate_dynamic(const CsdidResult& result) {
  if (result.cells.empty()) {
    throw_error(ErrorCode::ConfigError, "no group-time cells to aggregate");
  }
  std::map<int, std::vector<const GroupTimeATT*>> by_event;
  for (const auto& cell : result.cells) {
    by_event[cell.time - cell.group].push_back(&cell);
  }

  std::vector<DynamicEffect> out;
  out.reserve(by_event.size());
  for (const auto& [event_time, cells] : by_event) {
    double weight_sum = 0.0;
    for (const auto* cell : cells) weight_sum += cell->n_treated;
    DynamicEffect effect;
    effect.event_time = event_time;
    effect.n_groups = static_cast<int>(cells.size());
    std::vector<double> influence(result.n_units, 0.0);
    for (const auto* cell : cells) {
      const double w = cell->n_treated / weight_sum;
      effect.estimate += w * cell->att;
      for (int u = 0; u < result.n_units; ++u) {
        influence[u] += w * cell->influence[u];
      }
    }
    double var = 0.0;
    for (double v : influence) var += v * v;
    effect.se = std::sqrt(var);
    out.push_back(std::move(effect));
  }
  return out;
}

SimultaneousBands simultaneous_bands(const CsdidResult& result, double level,
                                     int draws, std::uint64_t seed) {
  if (draws < 100) throw_error(ErrorCode::ConfigError, "need >= 100 draws");
  if (level <= 0 || level >= 1) {
    throw_error(ErrorCode::ConfigError, "level must lie in (0, 1)");
  }

  // Mammen two-point multipliers.
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const double lo = 1.0 - golden;       // -(sqrt(5)-1)/2
  const double hi = golden;             // (sqrt(5)+1)/2
  const double p_lo = golden / std::sqrt(5.0);

  Rng rng(seed);
  std::vector<double> sup(draws, 0.0);
  std::vector<double> weights(result.n_units);
  for (int b = 0; b < draws; ++b) {
    for (int u = 0; u < result.n_units; ++u) {
      weights[u] = rng.uniform01() < p_lo ? lo : hi;
    }
    double worst = 0.0;
    for (const auto& cell : result.cells) {
      if (cell.se <= 0) continue;
      double bump = 0.0;
      for (int u = 0; u < result.n_units; ++u) {
        bump += weights[u] * cell.influence[u];
      }
      worst = std::max(worst, std::fabs(bump) / cell.se);
    }
    sup[b] = worst;
  }
  std::sort(sup.begin(), sup.end());
  const auto pick = static_cast<std::size_t>(
      std::ceil(level * draws)) - 1;
  double crit = sup[std::min(pick, sup.size() - 1)];

  // Simultaneous bands must contain the pointwise normal bands: never let the
  // bootstrap critical value fall below the two-sided normal quantile.
  double lo_q = 0.0, hi_q = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo_q + hi_q) / 2;
    if (normal_two_sided_p(mid) > 1.0 - level) lo_q = mid;
    else hi_q = mid;
  }
  crit = std::max(crit, (lo_q + hi_q) / 2);

  SimultaneousBands bands;
  bands.critical_value = crit;
  bands.half_width.reserve(result.cells.size());
  for (const auto& cell : result.cells) {
    bands.half_width.push_back(crit * cell.se);
  }
  return bands;
}

}  // namespace epipanel
