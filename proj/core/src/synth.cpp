#include "epipanel/synth.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "epipanel/csv.hpp"
#include "epipanel/errors.hpp"
#include "epipanel/rng.hpp"

namespace epipanel {

namespace {

std::string padded_id(const char* prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%04d", prefix, i);
  return buf;
}

}  // namespace

SynthPanel generate_synth_panel(const SynthPanelConfig& config,
                                std::uint64_t seed, int jobs) {
  if (config.n_units < 1 || config.n_days < 1 || config.n_states < 1) {
    throw_error(ErrorCode::ConfigError, "synthetic panel dimensions must be >= 1");
  }
  const int n_units = config.n_units;
  const int n_days = config.n_days;
  const int n_weeks = (n_days + 6) / 7;

  std::vector<std::string> unit_ids(n_units);
  std::vector<std::string> states(n_units);
  for (int i = 0; i < n_units; ++i) {
    unit_ids[i] = padded_id("C", i);
    states[i] = padded_id("S", i % config.n_states);
  }

  // State-week shocks from the global stream, in fixed (state, week) order.
  Rng global(derive_seed(seed, "synth-global"));
  std::vector<double> delta(static_cast<std::size_t>(config.n_states) * n_weeks);
  for (int s = 0; s < config.n_states; ++s) {
    for (int w = 0; w < n_weeks; ++w) {
      delta[static_cast<std::size_t>(s) * n_weeks + w] =
          global.normal(0.0, config.state_week_sd);
    }
  }

  PanelDataset panel(unit_ids, config.start_date, n_days);
  const std::size_t n_rows = panel.n_rows();
  Series new_cases(n_rows, kMissing), new_deaths(n_rows, kMissing),
      tests(n_rows, kMissing);
  std::vector<Series> policy_cols(config.policies.size(),
                                  Series(n_rows, kMissing));
  std::vector<Series> noise_cols(config.noise_series.size(),
                                 Series(n_rows, kMissing));

  std::atomic<int> died_out{0};
  auto simulate_unit = [&](int i) {
    Rng rng(derive_seed(seed, "synth-unit", static_cast<std::uint64_t>(i)));
    const int state = i % config.n_states;

    const double alpha = rng.normal(0.0, config.unit_effect_sd);
    std::vector<int> adopt_day(config.policies.size(), -1);
    for (std::size_t k = 0; k < config.policies.size(); ++k) {
      const auto& policy = config.policies[k];
      const bool adopts = rng.uniform01() < policy.adopt_fraction;
      // Week-aligned adoption: switches land on one weekday, so every
      // adopter shares the same transition shape relative to the weekly
      // windows of the derived outcomes.
      const int weeks = std::max(0, (policy.latest_day - policy.earliest_day) / 7);
      const int day = policy.earliest_day +
                      7 * static_cast<int>(rng.uniform_int(
                              static_cast<std::uint64_t>(weeks) + 1));
      if (adopts) adopt_day[k] = day;
    }
    std::vector<double> eps(n_days);
    for (int d = 0; d < n_days; ++d) eps[d] = rng.normal(0.0, config.beta_noise_sd);

    std::vector<double> obs_case(n_days), obs_death(n_days), obs_test(n_days);
    for (int d = 0; d < n_days; ++d) {
      obs_case[d] = rng.normal(0.0, config.obs_noise_sd);
      obs_death[d] = rng.normal(0.0, config.obs_noise_sd);
      obs_test[d] = rng.normal(0.0, config.test_noise_sd);
    }

    for (std::size_t c = 0; c < config.noise_series.size(); ++c) {
      double level = rng.normal(0.1, config.noise_series_sd);
      double ar = 0.0;
      for (int d = 0; d < n_days; ++d) {
        ar = 0.8 * ar + rng.normal(0.0, config.noise_series_sd);
        noise_cols[c][panel.row_index(i, d)] = level + ar;
      }
    }

    // With feedback, start each unit at the infection level where its
    // transmission balances recovery; without it, at the common seed level.
    const double log_weekly_eq =
        config.info_feedback != 0.0
            ? (config.base_log_beta + alpha - std::log(config.gamma)) /
                  (-config.info_feedback)
            : 0.0;
    double infected0 = config.init_infected;
    if (config.info_feedback != 0.0) {
      infected0 = std::exp(log_weekly_eq) / (7.0 * config.detection_rate);
      infected0 = std::min(std::max(infected0, 1.0), 0.05 * config.population);
    }

    // Daily-chunked integration: log-beta is constant within a day, so the
    // information feedback can read the already-computed case history.
    std::vector<double> confirmed(n_days + 1, 0.0), deceased(n_days + 1, 0.0);
    SirdState state_now{config.population - infected0, infected0, 0.0, 0.0, 0.0};
    double min_infected = infected0;
    for (int d = 0; d < n_days; ++d) {
      double log_beta = config.base_log_beta + alpha +
                        delta[static_cast<std::size_t>(state) * n_weeks + d / 7] +
                        eps[d];
      for (std::size_t k = 0; k < config.policies.size(); ++k) {
        const auto& policy = config.policies[k];
        if (adopt_day[k] < 0) continue;
        // Trailing 7-day mean of the adoption indicator, lagged.
        const double in_window =
            d - policy.response_lag_days - adopt_day[k] + 1;
        const double exposure = std::min(1.0, std::max(0.0, in_window / 7.0));
        log_beta += policy.theta * exposure;
      }
      if (config.info_feedback != 0.0) {
        const int at = d - config.info_lag_days;
        // Before a full week of history exists the equilibrium level stands
        // in, which avoids a startup transient in beta.
        double log_weekly = log_weekly_eq;
        if (at >= 7) {
          const double weekly = confirmed[at] - confirmed[at - 7];
          log_weekly = weekly > 0.0 ? std::log(weekly) : -1.0;
        }
        log_beta += config.info_feedback * log_weekly;
      }

      SirdParams day_params;
      day_params.population = config.population;
      day_params.beta = constant_rate(std::exp(log_beta));
      day_params.gamma = config.gamma;
      day_params.kappa = config.kappa;
      day_params.tau = constant_rate(config.detection_rate);
      const SirdTrajectory chunk =
          integrate(day_params, state_now, 1.0, config.sird_dt);
      state_now = chunk.path.back();
      for (const auto& s : chunk.path) {
        min_infected = std::min(min_infected, s.infected);
      }
      confirmed[d + 1] = state_now.confirmed;
      deceased[d + 1] = state_now.deceased;
    }
    if (min_infected < 1.0) died_out.fetch_add(1);

    for (int d = 0; d < n_days; ++d) {
      const std::size_t idx = panel.row_index(i, d);
      // Panel day d records counts confirmed during (d-1, d].
      const double raw_cases =
          d == 0 ? 0.0 : confirmed[d] - confirmed[d - 1];
      const double raw_deaths = d == 0 ? 0.0 : deceased[d] - deceased[d - 1];
      double cases = raw_cases * std::exp(obs_case[d]);
      double death_count = raw_deaths * std::exp(obs_death[d]);
      double test_count = 1000.0 * std::exp(obs_test[d]);
      if (config.integer_counts) {
        cases = std::round(cases);
        death_count = std::round(death_count);
        test_count = std::round(test_count);
      }
      new_cases[idx] = cases;
      new_deaths[idx] = death_count;
      tests[idx] = test_count;
      for (std::size_t k = 0; k < config.policies.size(); ++k) {
        policy_cols[k][idx] =
            (adopt_day[k] >= 0 && d >= adopt_day[k]) ? 1.0 : 0.0;
      }
    }
  };

  if (jobs <= 1 || n_units <= 1) {
    for (int i = 0; i < n_units; ++i) simulate_unit(i);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int i = next.fetch_add(1); i < n_units; i = next.fetch_add(1)) {
        simulate_unit(i);
      }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min(jobs, n_units);
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  panel.add_series("new_cases", std::move(new_cases));
  panel.add_series("new_deaths", std::move(new_deaths));
  panel.add_series("tests", std::move(tests));
  for (std::size_t k = 0; k < config.policies.size(); ++k) {
    panel.add_series(config.policies[k].name, std::move(policy_cols[k]));
  }
  for (std::size_t c = 0; c < config.noise_series.size(); ++c) {
    panel.add_series(config.noise_series[c], std::move(noise_cols[c]));
  }
  panel.add_unit_attr("state", std::move(states));
  panel.add_unit_attr("population",
                      std::vector<std::string>(
                          n_units, csv::format_number(config.population)));

  SynthTruth truth;
  for (const auto& policy : config.policies) {
    truth.theta.emplace_back(policy.name, policy.theta);
  }
  truth.units_died_out = died_out.load();
  truth.epidemic_died_out = died_out.load() * 2 > n_units;
  return {std::move(panel), std::move(truth)};
}

void save_truth_csv(const SynthTruth& truth, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
  out << "term,theta\n";
  for (const auto& [name, value] : truth.theta) {
    out << csv::escape(name) << "," << csv::format_number(value) << "\n";
  }
}

}  // namespace epipanel
