#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "epipanel/panel.hpp"
#include "epipanel/sird.hpp"

namespace epipanel {

// A binary adoption policy entering log-beta with coefficient theta. The
// emitted series switches 0 -> 1 at the unit's adoption day; transmission
// responds response_lag_days later, which centers the weekly-growth response
// on the 14-day reporting lag used by the case regressions.
struct SynthPolicy {
  std::string name = "policy1";
  double theta = 0.05;
  double adopt_fraction = 0.5;
  int earliest_day = 40;
  int latest_day = 120;
  int response_lag_days = 7;
};

struct SynthPanelConfig {
  int n_units = 300;
  int n_days = 180;
  int n_states = 50;
  Date start_date = Date::from_ymd(2020, 4, 1);

  double population = 1e6;
  // Used when info_feedback is zero; with feedback active each unit starts at
  // its own equilibrium infection level instead.
  double init_infected = 50.0;
  // Calibration: gamma = 1/7 puts the weekly-growth response to a unit
  // log-beta shift at one-for-one near equilibrium, so theta is read off the
  // case-growth regression directly. base_log_beta is chosen so equilibrium
  // weekly detected counts sit near exp(5) ~ 150.
  double base_log_beta = -1.445910109093219;  // ln(1/7) + 0.1 * 5
  double gamma = 0.14285714285714285;         // 1/7
  double kappa = 0.02;
  double detection_rate = 0.2;

  double unit_effect_sd = 0.10;   // alpha_i
  double state_week_sd = 0.02;    // delta_{s,w}
  double beta_noise_sd = 0.05;    // daily i.i.d. shocks on log-beta
  double obs_noise_sd = 0.057;    // multiplicative, daily reported counts
  double test_noise_sd = 0.05;    // multiplicative, daily test counts

  // Behavioral response of log-beta to own lagged log weekly detected cases:
  // case growth slows when reported cases are high. This is what gives the
  // lagged log-case regressors their negative coefficients and keeps unit
  // case levels mean-reverting around unit-specific equilibria, so the
  // policy coefficient stays the impact effect conditional on the lag stack.
  double info_feedback = -0.1;
  int info_lag_days = 7;

  std::vector<SynthPolicy> policies = {SynthPolicy{}};
  // Exogenous AR(1) columns with zero true effect, emitted so that the full
  // sensitivity grid has its control columns available.
  std::vector<std::string> noise_series = {
      "k12_visits",  "college_visits", "restaurant_visits",
      "bar_visits",  "rec_visits",     "church_visits",
      "full_work",   "part_work",      "home_share",
      "mask_mandate", "gathering_ban", "stay_home"};
  double noise_series_sd = 0.05;

  double sird_dt = 0.05;
  bool integer_counts = true;  // round daily counts before weekly sums
};

struct SynthTruth {
  std::vector<std::pair<std::string, double>> theta;  // policy column -> value
  int units_died_out = 0;       // units where I dropped below one person
  bool epidemic_died_out = false;  // true when that exceeds half the units
};

struct SynthPanel {
  PanelDataset panel;
  SynthTruth truth;
};

// Per-unit SIRD integration with log-beta driven by unit effects, state-week
// shocks, policies, and noise. Emits daily new_cases / new_deaths / tests
// plus the policy and noise columns, with "state" and "population" unit
// attributes. Units draw from independent derived streams, so identical
// (config, seed) pairs produce identical panels at any worker count.
SynthPanel generate_synth_panel(const SynthPanelConfig& config,
                                std::uint64_t seed, int jobs = 1);

// Writes the term -> theta sidecar consumed by the acceptance harness.
void save_truth_csv(const SynthTruth& truth, const std::string& path);

}  // namespace epipanel
