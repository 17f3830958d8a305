#include "epipanel/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

#include <json.hpp>

#include "epipanel/debias.hpp"
#include "epipanel/errors.hpp"
#include "epipanel/transforms.hpp"

namespace epipanel {

void derive_analysis_columns(PanelDataset& dataset, const DeriveOptions& options) {
  const PanelShape shape = dataset.shape();
  const double z = options.zero_log_value;

  const Series weekly_cases = rolling_sum(dataset.series("new_cases"), shape, 7);
  const Series log_cases = log_weekly(weekly_cases, z);
  dataset.add_series("weekly_cases", weekly_cases);
  dataset.add_series("log_weekly_cases", log_cases);
  dataset.add_series("case_growth", log_diff(log_cases, shape, 7));

  if (dataset.has_series("new_deaths")) {
    const Series weekly_deaths =
        rolling_sum(dataset.series("new_deaths"), shape, 7);
    const Series log_deaths = log_weekly(weekly_deaths, z);
    dataset.add_series("weekly_deaths", weekly_deaths);
    dataset.add_series("log_weekly_deaths", log_deaths);
    dataset.add_series("death_growth", log_diff(log_deaths, shape, 21));
  }

  if (dataset.has_series("tests")) {
    const Series weekly_tests = rolling_sum(dataset.series("tests"), shape, 7);
    dataset.add_series("test_growth",
                       log_diff(log_weekly(weekly_tests, z), shape, 7));
  }

  if (dataset.has_unit_attr("population")) {
    const auto& pop_attr = dataset.unit_attr("population");
    const Series cumulative = cumulative_sum(dataset.series("new_cases"), shape);
    Series per_capita(cumulative.size(), kMissing);
    for (int u = 0; u < shape.n_units; ++u) {
      if (pop_attr[u].empty()) continue;
      const double pop = std::strtod(pop_attr[u].c_str(), nullptr);
      if (pop <= 0) continue;
      for (int d = 0; d < shape.n_days; ++d) {
        const std::size_t idx = dataset.row_index(u, d);
        if (!is_missing(cumulative[idx])) per_capita[idx] = cumulative[idx] / pop;
      }
    }
    dataset.add_series("cum_cases_pc", std::move(per_capita));
    if (dataset.has_series("new_deaths")) {
      const Series cum_deaths =
          cumulative_sum(dataset.series("new_deaths"), shape);
      Series deaths_pc(cum_deaths.size(), kMissing);
      for (int u = 0; u < shape.n_units; ++u) {
        if (pop_attr[u].empty()) continue;
        const double pop = std::strtod(pop_attr[u].c_str(), nullptr);
        if (pop <= 0) continue;
        for (int d = 0; d < shape.n_days; ++d) {
          const std::size_t idx = dataset.row_index(u, d);
          if (!is_missing(cum_deaths[idx])) deaths_pc[idx] = cum_deaths[idx] / pop;
        }
      }
      dataset.add_series("cum_deaths_pc", std::move(deaths_pc));
    }
  }
}

namespace {

const std::vector<std::string> kVenueCols = {"restaurant_visits", "bar_visits",
                                             "rec_visits", "church_visits"};
const std::vector<std::string> kMobilityCols = {"full_work", "part_work",
                                                "home_share"};

Term make_term(const std::string& column, int lag, int ma,
               const std::string& interact = "") {
  Term term;
  term.column = column;
  term.lag_days = lag;
  term.ma_window = ma;
  term.interact_with = interact;
  return term;
}

void add_policy_block(RegressionSpec& spec, const GridVariant& variant,
                      const SpecColumns& columns) {
  for (const auto& col : columns.policy_cols) {
    spec.regressors.push_back(make_term(col, variant.policy_lag, columns.ma_window));
  }
  for (const auto& col : columns.share_cols) {
    spec.regressors.push_back(make_term(col, variant.policy_lag, columns.ma_window));
  }
  for (const auto& col : columns.interact_cols) {
    spec.regressors.push_back(
        make_term(col, variant.policy_lag, columns.ma_window, columns.mask_col));
  }
  for (const auto& col : columns.npi_cols) {
    spec.regressors.push_back(make_term(col, variant.policy_lag, columns.ma_window));
  }
}

void add_common_tail(RegressionSpec& spec, const SpecColumns& columns) {
  spec.fe_factors.push_back({"unit", TimeBucket::None});
  spec.fe_factors.push_back({columns.state_attr, TimeBucket::Week});
  spec.cluster_var = columns.state_attr;
}

}  // namespace

RegressionSpec build_case_spec(const GridVariant& variant,
                               const SpecColumns& columns) {
  RegressionSpec spec;
  spec.outcome = make_term("case_growth", 0, 1);
  add_policy_block(spec, variant, columns);
  for (int tau : {14, 21, 28}) {
    spec.regressors.push_back(make_term("log_weekly_cases", tau, 1));
  }
  spec.regressors.push_back(make_term("test_growth", 0, 1));
  if (variant.add_info_controls) {
    spec.regressors.push_back(make_term("log_weekly_cases", 35, 1));
    spec.regressors.push_back(make_term("cum_cases_pc", 14, 1));
  }
  if (variant.add_venue_controls) {
    for (const auto& col : kVenueCols) {
      spec.regressors.push_back(make_term(col, 14, columns.ma_window));
      spec.regressors.push_back(make_term(col, 28, columns.ma_window));
    }
  }
  if (variant.add_mobility_controls) {
    for (const auto& col : kMobilityCols) {
      spec.regressors.push_back(make_term(col, 14, columns.ma_window));
    }
  }
  add_common_tail(spec, columns);
  return spec;
}

RegressionSpec build_death_spec(const GridVariant& variant,
                                const SpecColumns& columns) {
  RegressionSpec spec;
  spec.outcome = make_term("death_growth", 0, 1);
  add_policy_block(spec, variant, columns);
  for (int tau : {35, 42, 49}) {
    spec.regressors.push_back(make_term("log_weekly_deaths", tau, 1));
  }
  if (variant.add_info_controls) {
    spec.regressors.push_back(make_term("log_weekly_deaths", 56, 1));
    spec.regressors.push_back(make_term("cum_deaths_pc", 35, 1));
  }
  if (variant.add_venue_controls) {
    for (const auto& col : kVenueCols) {
      spec.regressors.push_back(make_term(col, 35, columns.ma_window));
      spec.regressors.push_back(make_term(col, 49, columns.ma_window));
    }
  }
  if (variant.add_mobility_controls) {
    for (const auto& col : kMobilityCols) {
      spec.regressors.push_back(make_term(col, 35, columns.ma_window));
    }
  }
  add_common_tail(spec, columns);
  return spec;
}

RegressionSpec build_behavior_spec(const std::string& outcome_col,
                                   const SpecColumns& columns) {
  RegressionSpec spec;
  spec.outcome = make_term(outcome_col, 0, columns.ma_window);
  GridVariant unlagged;
  unlagged.policy_lag = 0;
  add_policy_block(spec, unlagged, columns);
  for (int tau : {0, 7, 14}) {
    spec.regressors.push_back(make_term("log_weekly_cases", tau, 1));
  }
  add_common_tail(spec, columns);
  return spec;
}

SensitivityGrid default_case_grid() {
  SensitivityGrid grid;
  grid.family = "case";
  grid.variants = {
      {"baseline", "14-day policy lag, zero weeks logged as -1", 14, -1.0,
       false, false, false},
      {"lag10", "10-day policy lag", 10, -1.0, false, false, false},
      {"lag18", "18-day policy lag", 18, -1.0, false, false, false},
      {"zero_as_zero", "zero-count weeks logged as 0", 14, 0.0, false, false,
       false},
      {"info_controls", "adds 5-week log cases and cumulative cases", 14, -1.0,
       true, false, false},
      {"venue_controls", "adds venue visits at 2- and 4-week lags", 14, -1.0,
       false, true, false},
      {"mobility_controls", "adds workplace and stay-home shares", 14, -1.0,
       false, false, true},
      {"all_controls", "all added controls", 14, -1.0, true, true, true},
  };
  return grid;
}

SensitivityGrid default_death_grid() {
  SensitivityGrid grid;
  grid.family = "death";
  grid.variants = {
      {"baseline", "35-day policy lag, zero weeks logged as -1", 35, -1.0,
       false, false, false},
      {"lag42", "42-day policy lag", 42, -1.0, false, false, false},
      {"lag49", "49-day policy lag", 49, -1.0, false, false, false},
      {"zero_as_zero", "zero-count weeks logged as 0", 35, 0.0, false, false,
       false},
      {"info_controls", "adds 8-week log deaths and cumulative deaths", 35,
       -1.0, true, false, false},
      {"venue_controls", "adds venue visits at 5- and 7-week lags", 35, -1.0,
       false, true, false},
      {"mobility_controls", "adds workplace and stay-home shares", 35, -1.0,
       false, false, true},
      {"all_controls", "all added controls", 35, -1.0, true, true, true},
  };
  return grid;
}

namespace {

double normal_quantile_two_sided(double level) {
  double lo = 0.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    const double p = std::erfc(mid / std::sqrt(2.0));
    if (p > 1.0 - level) lo = mid;
    else hi = mid;
  }
  return (lo + hi) / 2;
}

int tracked_index(const RegressionSpec& spec, const std::string& tracked) {
  for (std::size_t i = 0; i < spec.regressors.size(); ++i) {
    const auto& term = spec.regressors[i];
    const std::string key = term.interact_with.empty()
                                ? term.column
                                : term.column + "*" + term.interact_with;
    if (key == tracked) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

std::vector<GridRow> run_grid(const PanelDataset& raw_panel,
                              const SensitivityGrid& grid, int jobs) {
  // Derived datasets are shared read-only across workers, so build every
  // zero-rule variant up front.
  std::map<double, PanelDataset> derived;
  for (const auto& variant : grid.variants) {
    if (derived.count(variant.zero_log_value)) continue;
    PanelDataset copy = raw_panel;
    derive_analysis_columns(copy, {variant.zero_log_value});
    derived.emplace(variant.zero_log_value, std::move(copy));
  }

  const double z_crit = normal_quantile_two_sided(grid.ci_level);
  const std::size_t n_tasks = grid.variants.size() * grid.estimators.size();
  std::vector<std::vector<GridRow>> slots(n_tasks);

  auto run_task = [&](std::size_t task) {
    const auto& variant = grid.variants[task / grid.estimators.size()];
    const Estimator estimator = grid.estimators[task % grid.estimators.size()];
    RegressionSpec spec = grid.family == "death"
                              ? build_death_spec(variant, grid.columns)
                              : build_case_spec(variant, grid.columns);
    spec.jackknife_reps = grid.jackknife_reps;
    spec.rng_seed = grid.seed;
    spec.estimator = estimator;

    FitResult result;
    bool failed = false;
    std::string error;
    try {
      result = fit(derived.at(variant.zero_log_value), spec);
    } catch (const Error& e) {
      failed = true;
      error = e.what();
    }
    for (const auto& tracked : grid.tracked_terms) {
      GridRow row;
      row.variant = variant.id;
      row.term = tracked;
      row.estimator = estimator;
      row.failed = failed;
      row.error = error;
      if (!failed) {
        const int idx = tracked_index(spec, tracked);
        if (idx < 0) {
          row.failed = true;
          row.error = "tracked term not in spec: " + tracked;
        } else {
          row.estimate = result.coefficients[idx];
          row.se = result.se[idx];
          row.ci_lo = row.estimate - z_crit * row.se;
          row.ci_hi = row.estimate + z_crit * row.se;
        }
      }
      slots[task].push_back(std::move(row));
    }
  };

  if (jobs <= 1 || n_tasks <= 1) {
    for (std::size_t task = 0; task < n_tasks; ++task) run_task(task);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t task = next.fetch_add(1); task < n_tasks;
           task = next.fetch_add(1)) {
        run_task(task);
      }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min<int>(jobs, static_cast<int>(n_tasks));
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<GridRow> rows;
  rows.reserve(n_tasks * grid.tracked_terms.size());
  for (auto& slot : slots) {
    for (auto& row : slot) rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

using nlohmann::json;

json term_to_json(const Term& term) {
  json j;
  j["column"] = term.column;
  if (term.lag_days != 0) j["lag"] = term.lag_days;
  if (term.ma_window != 1) j["ma"] = term.ma_window;
  if (!term.interact_with.empty()) j["interact"] = term.interact_with;
  if (!term.display_name.empty()) j["name"] = term.display_name;
  return j;
}

Term term_from_json(const json& j) {
  Term term;
  term.column = j.at("column").get<std::string>();
  term.lag_days = j.value("lag", 0);
  term.ma_window = j.value("ma", 1);
  term.interact_with = j.value("interact", std::string{});
  term.display_name = j.value("name", std::string{});
  return term;
}

std::string bucket_name(TimeBucket bucket) {
  switch (bucket) {
    case TimeBucket::None: return "none";
    case TimeBucket::Day: return "day";
    case TimeBucket::Week: return "week";
  }
  return "none";
}

TimeBucket bucket_from_name(const std::string& name) {
  if (name == "none") return TimeBucket::None;
  if (name == "day") return TimeBucket::Day;
  if (name == "week") return TimeBucket::Week;
  throw_error(ErrorCode::ConfigError, "unknown time bucket '" + name + "'");
}

Estimator estimator_from_name(const std::string& name) {
  if (name == "fe") return Estimator::PlainFe;
  if (name == "bc") return Estimator::DebiasedBc;
  if (name == "cbc") return Estimator::DebiasedCbc;
  throw_error(ErrorCode::ConfigError, "unknown estimator '" + name + "'");
}

}  // namespace

std::string spec_to_json(const RegressionSpec& spec) {
  json j;
  j["outcome"] = term_to_json(spec.outcome);
  j["regressors"] = json::array();
  for (const auto& term : spec.regressors) {
    j["regressors"].push_back(term_to_json(term));
  }
  j["fe_factors"] = json::array();
  for (const auto& factor : spec.fe_factors) {
    j["fe_factors"].push_back(
        {{"unit_attr", factor.unit_attr}, {"bucket", bucket_name(factor.bucket)}});
  }
  j["cluster"] = spec.cluster_var;
  j["estimator"] = estimator_name(spec.estimator);
  j["jackknife_reps"] = spec.jackknife_reps;
  j["seed"] = spec.rng_seed;
  j["demean_tol"] = spec.demean_tol;
  j["demean_max_iter"] = spec.demean_max_iter;
  j["small_sample_correction"] = spec.small_sample_correction;
  j["t_reference"] = spec.t_reference;
  return j.dump(2);
}

RegressionSpec spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_error(ErrorCode::ConfigError, std::string("spec parse: ") + e.what());
  }
  try {
    RegressionSpec spec;
    spec.outcome = term_from_json(j.at("outcome"));
    for (const auto& item : j.at("regressors")) {
      spec.regressors.push_back(term_from_json(item));
    }
    for (const auto& item : j.value("fe_factors", json::array())) {
      FactorSpec factor;
      factor.unit_attr = item.at("unit_attr").get<std::string>();
      factor.bucket = bucket_from_name(item.value("bucket", "none"));
      spec.fe_factors.push_back(factor);
    }
    spec.cluster_var = j.value("cluster", std::string("unit"));
    spec.estimator = estimator_from_name(j.value("estimator", "fe"));
    spec.jackknife_reps = j.value("jackknife_reps", 2);
    spec.rng_seed = j.value("seed", std::uint64_t{1});
    spec.demean_tol = j.value("demean_tol", 1e-8);
    spec.demean_max_iter = j.value("demean_max_iter", 10000);
    spec.small_sample_correction = j.value("small_sample_correction", true);
    spec.t_reference = j.value("t_reference", false);
    return spec;
  } catch (const json::exception& e) {
    throw_error(ErrorCode::ConfigError, std::string("spec schema: ") + e.what());
  }
}

}  // namespace epipanel
