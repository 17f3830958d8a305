#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epipanel/panel.hpp"
#include "epipanel/regression.hpp"

namespace epipanel {

// Derivations shared by every estimation: weekly counts from daily counts,
// zero-aware logs, growth outcomes, test growth, cumulative cases per capita.
// Expects raw columns new_cases / new_deaths / tests and a "population" unit
// attribute; derived columns are added (or replaced) in place.
struct DeriveOptions {
  double zero_log_value = -1.0;  // log of a zero-count week
};
void derive_analysis_columns(PanelDataset& dataset,
                             const DeriveOptions& options = {});

// Column-name bindings for the spec builders, so the same machinery runs on
// production-shaped and synthetic panels.
struct SpecColumns {
  std::vector<std::string> policy_cols = {"k12_visits", "college_visits"};
  std::vector<std::string> share_cols;     // e.g. in-person/hybrid/remote shares
  std::vector<std::string> interact_cols;  // interacted with mask_col
  std::string mask_col = "no_mask";
  std::vector<std::string> npi_cols = {"mask_mandate", "gathering_ban",
                                       "stay_home"};
  std::string state_attr = "state";
  int ma_window = 7;
};

// One sensitivity-grid cell: which lag the policy block uses, how zero-count
// weeks enter the log, and which optional control blocks are added.
struct GridVariant {
  std::string id;
  std::string description;
  int policy_lag = 14;
  double zero_log_value = -1.0;
  bool add_info_controls = false;      // longer outcome lag + cumulative counts
  bool add_venue_controls = false;     // restaurant/bar/recreation/church
  bool add_mobility_controls = false;  // workplace and stay-home shares
};

// Weekly case growth on lagged policy/visit terms, NPIs, lagged log cases,
// and unlagged test growth, with unit and state-week fixed effects and
// state-clustered errors.
RegressionSpec build_case_spec(const GridVariant& variant,
                               const SpecColumns& columns = {});

// 21-day death growth with 35/42/49-day dynamics and no test-growth term.
RegressionSpec build_death_spec(const GridVariant& variant,
                                const SpecColumns& columns = {});

// Mobility outcomes on unlagged policy terms and current/lagged log cases.
RegressionSpec build_behavior_spec(const std::string& outcome_col,
                                   const SpecColumns& columns = {});

struct SensitivityGrid {
  std::string family = "case";  // "case" or "death"
  std::vector<GridVariant> variants;
  std::vector<Estimator> estimators = {Estimator::PlainFe, Estimator::DebiasedBc};
  // Tracked entries name a regressor column, or "column*partner" for an
  // interaction; every (variant, estimator, tracked) triple emits one row.
  std::vector<std::string> tracked_terms = {"k12_visits", "college_visits"};
  SpecColumns columns;
  int jackknife_reps = 2;
  std::uint64_t seed = 1;
  double ci_level = 0.90;
};

SensitivityGrid default_case_grid();
SensitivityGrid default_death_grid();

struct GridRow {
  std::string variant;
  std::string term;  // tracked name
  Estimator estimator = Estimator::PlainFe;
  double estimate = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool failed = false;
  std::string error;
};

// Runs every variant under every estimator; per-variant failures are recorded
// in their rows and the grid continues. Row order is (variant, estimator,
// tracked term) in declaration order regardless of the worker count.
std::vector<GridRow> run_grid(const PanelDataset& raw_panel,
                              const SensitivityGrid& grid, int jobs = 1);

// Declarative round-trip of a RegressionSpec (JSON document).
std::string spec_to_json(const RegressionSpec& spec);
RegressionSpec spec_from_json(const std::string& text);

}  // namespace epipanel
