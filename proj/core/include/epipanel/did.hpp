#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epipanel/date.hpp"
#include "epipanel/panel.hpp"
#include "epipanel/regression.hpp"

namespace epipanel {

// Leads-and-lags regression: weekly event-time dummies per treatment group,
// unit fixed effects, no time effects, SEs clustered by unit.
struct EventStudySpec {
  std::string outcome;
  std::string group_attr = "dominant_mode";   // treatment group label per unit
  std::string opening_attr = "opening_date";  // ISO date; empty = never treated
  int lead_weeks = 8;
  int lag_weeks = 22;
  // Optional subsample filter: keep treated units whose opening date falls in
  // [band_lo, band_hi]; never-treated units always pass.
  std::optional<Date> band_lo;
  std::optional<Date> band_hi;
  double demean_tol = 1e-8;
  int demean_max_iter = 10000;
};

struct EventStudyCell {
  std::string group;
  int event_week = 0;  // weeks relative to opening, negative = lead
  double estimate = 0.0;
  double se = 0.0;
  long n_obs = 0;
};

struct EventStudyResult {
  std::vector<EventStudyCell> cells;
  FitResult fit;
};

EventStudyResult event_study_fit(const PanelDataset& dataset,
                                 const EventStudySpec& spec);

struct CsdidOptions {
  std::string outcome;
  std::string opening_attr = "opening_date";
  // Daily panels are binned into periods of this many days (outcome averaged
  // within unit-period); a group is the period containing the opening date.
  int period_days = 7;
  int low_reliability_below = 2;  // flag groups with fewer treated units
};

// One (group, time) average treatment effect with its per-unit influence
// contributions (zero for units outside the cell's comparison).
struct GroupTimeATT {
  int group = 0;  // adoption period
  int time = 0;   // calendar period
  double att = 0.0;
  double se = 0.0;
  int n_treated = 0;
  int n_control = 0;
  bool low_reliability = false;
  std::vector<double> influence;  // aligned to dataset units; sums give att - E[att]
};

struct CsdidResult {
  std::vector<GroupTimeATT> cells;
  std::vector<int> unit_group;  // adoption period per unit; -1 = never treated
  int n_units = 0;
  int n_periods = 0;
  int period_days = 0;
  Date start;
};

// Unconditional group-time ATT with never-treated and not-yet-treated
// controls, universal base period g-1, influence-function SEs clustered by
// unit. Already-treated units never enter a control group.
CsdidResult csdid_att(const PanelDataset& dataset, const CsdidOptions& options);

struct DynamicEffect {
  int event_time = 0;  // periods since adoption; negative = pre-period
  double estimate = 0.0;
  double se = 0.0;
  int n_groups = 0;
};

// theta(e): average of ATT(g, g+e) across groups, weighted by group size,
// with delta-method SEs from the summed influence functions.
std::vector<DynamicEffect> aggregate_dynamic(const CsdidResult& result);

struct SimultaneousBands {
  double critical_value = 0.0;  // sup-t multiplier, never below the pointwise z
  std::vector<double> half_width;  // per cell, aligned to result.cells
};

// Multiplier bootstrap (Mammen weights) over the stored influence functions.
SimultaneousBands simultaneous_bands(const CsdidResult& result, double level,
                                     int draws, std::uint64_t seed);

}  // namespace epipanel
