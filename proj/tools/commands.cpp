#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "epipanel/csv.hpp"
#include "epipanel/debias.hpp"
#include "epipanel/did.hpp"
#include "epipanel/districts.hpp"
#include "epipanel/errors.hpp"
#include "epipanel/pipeline.hpp"
#include "epipanel/rng.hpp"
#include "epipanel/synth.hpp"
#include "epipanel/table.hpp"
#include "epipanel/transforms.hpp"
#include "manifest.hpp"

namespace epipanel::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitConfig = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn:
    case ErrorCode::DuplicateRow:
    case ErrorCode::UnparseableDate:
    case ErrorCode::NonNumericValue:
    case ErrorCode::NegativeCount:
    case ErrorCode::ZeroEnrollmentCounty:
    case ErrorCode::AllSharesZero:
    case ErrorCode::IoError:
      return kExitData;
    case ErrorCode::ConfigError:
      return kExitConfig;
    default:
      return kExitEstimation;
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::ConfigError, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    throw_error(ErrorCode::ConfigError, std::string("config parse: ") + e.what());
  }
}

CsvSchema schema_from(const json& j) {
  CsvSchema schema;
  if (!j.contains("schema")) return schema;
  const auto& s = j.at("schema");
  schema.unit_col = s.value("unit_col", schema.unit_col);
  schema.date_col = s.value("date_col", schema.date_col);
  schema.value_cols = s.value("value_cols", schema.value_cols);
  schema.attr_cols = s.value("attr_cols", schema.attr_cols);
  return schema;
}

PanelDataset load_panel(const json& config, RunManifest& manifest) {
  const std::string data = config.value("data", std::string{});
  if (data.empty()) throw_error(ErrorCode::ConfigError, "config needs 'data'");
  manifest.add_input(data);
  return load_csv(data, schema_from(config));
}

std::string out_path(const CommonArgs& args, const std::string& name,
                     RunManifest& manifest) {
  fs::create_directories(args.out_dir);
  auto path = (fs::path(args.out_dir) / name).string();
  manifest.outputs.push_back(path);
  return path;
}

SpecColumns columns_from(const json& j) {
  SpecColumns columns;
  if (!j.contains("columns")) return columns;
  const auto& c = j.at("columns");
  columns.policy_cols = c.value("policy_cols", columns.policy_cols);
  columns.share_cols = c.value("share_cols", columns.share_cols);
  columns.interact_cols = c.value("interact_cols", columns.interact_cols);
  columns.mask_col = c.value("mask_col", columns.mask_col);
  columns.npi_cols = c.value("npi_cols", columns.npi_cols);
  columns.state_attr = c.value("state_attr", columns.state_attr);
  columns.ma_window = c.value("ma_window", columns.ma_window);
  return columns;
}

GridVariant variant_from(const json& j, const std::string& family) {
  GridVariant variant;
  variant.id = j.value("id", std::string("custom"));
  variant.policy_lag = j.value("policy_lag", family == "death" ? 35 : 14);
  variant.zero_log_value = j.value("zero_log_value", -1.0);
  variant.add_info_controls = j.value("add_info_controls", false);
  variant.add_venue_controls = j.value("add_venue_controls", false);
  variant.add_mobility_controls = j.value("add_mobility_controls", false);
  return variant;
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEstimation;
  }
}

}  // namespace

int cmd_prepare(const CommonArgs& args) {
  return run_guarded([&] {
    const json config = load_config(args.config_path);
    RunManifest manifest;
    manifest.command = "prepare";
    manifest.config_path = args.config_path;
    manifest.seed = args.seed;

    const std::string panel_path = config.value("panel_csv", std::string{});
    if (panel_path.empty()) {
      throw_error(ErrorCode::ConfigError, "config needs 'panel_csv'");
    }
    manifest.add_input(panel_path);
    PanelDataset panel = load_csv(panel_path, schema_from(config));

    std::vector<CountyReport> reports;
    if (config.contains("districts_csv")) {
      const std::string districts_path = config.at("districts_csv");
      manifest.add_input(districts_path);
      const auto records = load_districts_csv(districts_path);
      const Calendar calendar{panel.start_date(), panel.n_days()};
      auto aggregation = aggregate_districts(records, calendar);
      reports = std::move(aggregation.reports);

      // Merge county-level series and attributes onto the panel; unmatched
      // panel units carry missing values.
      const auto& source = aggregation.panel;
      for (const auto& name : source.series_names()) {
        Series merged(panel.n_rows(), kMissing);
        for (int cu = 0; cu < source.n_units(); ++cu) {
          const int u = panel.unit_index(source.unit_id(cu));
          if (u < 0) continue;
          for (int d = 0; d < panel.n_days(); ++d) {
            merged[panel.row_index(u, d)] = source.series(name)[source.row_index(cu, d)];
          }
        }
        panel.add_series(name, std::move(merged));
      }
      for (const auto& name : source.unit_attr_names()) {
        std::vector<std::string> merged(panel.n_units());
        for (int cu = 0; cu < source.n_units(); ++cu) {
          const int u = panel.unit_index(source.unit_id(cu));
          if (u >= 0) merged[u] = source.unit_attr(name)[cu];
        }
        panel.add_unit_attr(name, std::move(merged));
      }
    }

    // Policy sources that stop updating are pinned at their last observed
    // value from a cutoff date onward.
    if (config.contains("carry_forward")) {
      const auto& cf = config.at("carry_forward");
      const auto after = Date::parse_iso(cf.at("after").get<std::string>());
      if (!after) throw_error(ErrorCode::ConfigError, "bad carry_forward.after");
      const int day = panel.day_index(*after);
      if (day < 0) {
        throw_error(ErrorCode::ConfigError,
                    "carry_forward.after outside the panel calendar");
      }
      for (const auto& name : cf.at("columns")) {
        const std::string column = name.get<std::string>();
        panel.add_series(
            column, carry_forward_after(panel.series(column), panel.shape(), day));
      }
    }

    if (config.value("derive", true)) {
      derive_analysis_columns(panel, {config.value("zero_log_value", -1.0)});
    }

    save_csv(panel, out_path(args, "panel.csv", manifest));

    if (!reports.empty()) {
      std::ofstream report(out_path(args, "district_report.csv", manifest),
                           std::ios::binary);
      report << "county,total_enrollment,unknown_mode_share,unknown_mask_share,"
                "dropped_mode,dropped_mask,no_mask,dominant_mode,"
                "inperson_share,hybrid_share,remote_share,opening_date\n";
      for (const auto& r : reports) {
        report << csv::escape(r.county_id) << ","
               << csv::format_number(r.total_enrollment) << ","
               << csv::format_number(r.unknown_mode_share) << ","
               << csv::format_number(r.unknown_mask_share) << ","
               << (r.dropped_mode_analysis ? 1 : 0) << ","
               << (r.dropped_mask_analysis ? 1 : 0) << "," << r.no_mask << ","
               << csv::escape(r.dominant_mode) << ","
               << csv::format_number(r.mode_enrollment_share[0]) << ","
               << csv::format_number(r.mode_enrollment_share[1]) << ","
               << csv::format_number(r.mode_enrollment_share[2]) << ",";
        if (r.has_open_date) {
          report << Date(static_cast<std::int64_t>(
                             std::llround(r.county_open_serial)))
                        .iso();
        }
        report << "\n";
      }
    }
    manifest.write(out_path(args, "manifest.json", manifest));
    std::cout << "prepared " << panel.n_units() << " units x " << panel.n_days()
              << " days\n";
  });
}

int cmd_fit(const CommonArgs& args) {
  return run_guarded([&] {
    const json config = load_config(args.config_path);
    RunManifest manifest;
    manifest.command = "fit";
    manifest.config_path = args.config_path;
    manifest.seed = args.seed;

    PanelDataset panel = load_panel(config, manifest);
    if (config.value("derive", false)) {
      derive_analysis_columns(panel, {config.value("zero_log_value", -1.0)});
    }

    RegressionSpec spec;
    if (config.contains("spec")) {
      spec = spec_from_json(config.at("spec").dump());
    } else if (config.contains("builder")) {
      const auto& b = config.at("builder");
      const std::string family = b.value("family", std::string("case"));
      const SpecColumns columns = columns_from(b);
      const GridVariant variant =
          variant_from(b.value("variant", json::object()), family);
      if (family == "case") {
        spec = build_case_spec(variant, columns);
      } else if (family == "death") {
        spec = build_death_spec(variant, columns);
      } else if (family == "behavior") {
        spec = build_behavior_spec(b.at("outcome").get<std::string>(), columns);
      } else {
        throw_error(ErrorCode::ConfigError, "unknown builder family " + family);
      }
      if (b.contains("estimator")) {
        const std::string name = b.at("estimator");
        spec.estimator = name == "bc"    ? Estimator::DebiasedBc
                         : name == "cbc" ? Estimator::DebiasedCbc
                                         : Estimator::PlainFe;
      }
      spec.jackknife_reps = b.value("jackknife_reps", spec.jackknife_reps);
    } else {
      throw_error(ErrorCode::ConfigError, "config needs 'spec' or 'builder'");
    }

    if (!args.estimator_override.empty()) {
      if (args.estimator_override == "fe") spec.estimator = Estimator::PlainFe;
      else if (args.estimator_override == "bc") spec.estimator = Estimator::DebiasedBc;
      else if (args.estimator_override == "cbc") spec.estimator = Estimator::DebiasedCbc;
      else throw_error(ErrorCode::ConfigError,
                       "unknown estimator " + args.estimator_override);
    }
    spec.rng_seed = derive_seed(args.seed, "debias");

    const FitResult result = fit(panel, spec);
    write_fit_csv(result, out_path(args, "fit.csv", manifest));
    const std::string table = format_fit_table(result);
    {
      std::ofstream txt(out_path(args, "fit.txt", manifest), std::ios::binary);
      txt << table;
    }
    manifest.write(out_path(args, "manifest.json", manifest));
    std::cout << table;
  });
}

int cmd_simulate(const CommonArgs& args) {
  return run_guarded([&] {
    const json config = load_config(args.config_path);
    RunManifest manifest;
    manifest.command = "simulate";
    manifest.config_path = args.config_path;
    manifest.seed = args.seed;

    SynthPanelConfig synth;
    synth.n_units = config.value("n_units", synth.n_units);
    synth.n_days = config.value("n_days", synth.n_days);
    synth.n_states = config.value("n_states", synth.n_states);
    if (config.contains("start_date")) {
      const auto date = Date::parse_iso(config.at("start_date").get<std::string>());
      if (!date) throw_error(ErrorCode::ConfigError, "bad start_date");
      synth.start_date = *date;
    }
    synth.population = config.value("population", synth.population);
    synth.init_infected = config.value("init_infected", synth.init_infected);
    synth.base_log_beta = config.value("base_log_beta", synth.base_log_beta);
    synth.gamma = config.value("gamma", synth.gamma);
    synth.kappa = config.value("kappa", synth.kappa);
    synth.detection_rate = config.value("detection_rate", synth.detection_rate);
    synth.unit_effect_sd = config.value("unit_effect_sd", synth.unit_effect_sd);
    synth.state_week_sd = config.value("state_week_sd", synth.state_week_sd);
    synth.beta_noise_sd = config.value("beta_noise_sd", synth.beta_noise_sd);
    synth.obs_noise_sd = config.value("obs_noise_sd", synth.obs_noise_sd);
    synth.test_noise_sd = config.value("test_noise_sd", synth.test_noise_sd);
    synth.info_feedback = config.value("info_feedback", synth.info_feedback);
    synth.info_lag_days = config.value("info_lag_days", synth.info_lag_days);
    synth.noise_series = config.value("noise_series", synth.noise_series);
    synth.noise_series_sd = config.value("noise_series_sd", synth.noise_series_sd);
    synth.sird_dt = config.value("sird_dt", synth.sird_dt);
    synth.integer_counts = config.value("integer_counts", synth.integer_counts);
    if (config.contains("policies")) {
      synth.policies.clear();
      for (const auto& p : config.at("policies")) {
        SynthPolicy policy;
        policy.name = p.value("name", policy.name);
        policy.theta = p.value("theta", policy.theta);
        policy.adopt_fraction = p.value("adopt_fraction", policy.adopt_fraction);
        policy.earliest_day = p.value("earliest_day", policy.earliest_day);
        policy.latest_day = p.value("latest_day", policy.latest_day);
        policy.response_lag_days =
            p.value("response_lag_days", policy.response_lag_days);
        synth.policies.push_back(policy);
      }
    }

    const auto result = generate_synth_panel(
        synth, derive_seed(args.seed, "simulate"), args.jobs);
    if (result.truth.epidemic_died_out) {
      std::cerr << "warning: infections fell below one person in "
                << result.truth.units_died_out << " of " << synth.n_units
                << " units\n";
    }
    save_csv(result.panel, out_path(args, "panel.csv", manifest));
    save_truth_csv(result.truth, out_path(args, "truth.csv", manifest));
    manifest.write(out_path(args, "manifest.json", manifest));
    std::cout << "simulated " << synth.n_units << " units x " << synth.n_days
              << " days\n";
  });
}

int cmd_did(const CommonArgs& args) {
  return run_guarded([&] {
    const json config = load_config(args.config_path);
    RunManifest manifest;
    manifest.command = "did";
    manifest.config_path = args.config_path;
    manifest.seed = args.seed;

    PanelDataset panel = load_panel(config, manifest);
    const std::string analysis = config.value("analysis", std::string("csdid"));
    const std::string outcome = config.value("outcome", std::string{});
    if (outcome.empty()) throw_error(ErrorCode::ConfigError, "config needs 'outcome'");

    if (analysis == "event_study") {
      EventStudySpec spec;
      spec.outcome = outcome;
      spec.group_attr = config.value("group_attr", spec.group_attr);
      spec.opening_attr = config.value("opening_attr", spec.opening_attr);
      spec.lead_weeks = config.value("lead_weeks", spec.lead_weeks);
      spec.lag_weeks = config.value("lag_weeks", spec.lag_weeks);
      if (config.contains("band_lo")) {
        spec.band_lo = Date::parse_iso(config.at("band_lo").get<std::string>());
      }
      if (config.contains("band_hi")) {
        spec.band_hi = Date::parse_iso(config.at("band_hi").get<std::string>());
      }
      const auto result = event_study_fit(panel, spec);
      std::ofstream out(out_path(args, "event_study.csv", manifest),
                        std::ios::binary);
      out << "group,time,event_time,att,se,band_lo,band_hi\n";
      for (const auto& cell : result.cells) {
        const double half = 1.959963984540054 * cell.se;
        out << csv::escape(cell.group) << ",," << cell.event_week << ","
            << csv::format_number(cell.estimate) << ","
            << csv::format_number(cell.se) << ","
            << csv::format_number(cell.estimate - half) << ","
            << csv::format_number(cell.estimate + half) << "\n";
      }
    } else if (analysis == "csdid") {
      CsdidOptions options;
      options.outcome = outcome;
      options.opening_attr = config.value("opening_attr", options.opening_attr);
      options.period_days = config.value("period_days", options.period_days);
      const auto result = csdid_att(panel, options);
      const double level = config.value("level", 0.95);
      const int draws = config.value("bootstrap_draws", 1000);
      const auto bands = simultaneous_bands(result, level, draws,
                                            derive_seed(args.seed, "did"));

      std::ofstream out(out_path(args, "att.csv", manifest), std::ios::binary);
      out << "group,time,event_time,att,se,band_lo,band_hi\n";
      for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const auto& cell = result.cells[c];
        const Date group_date =
            result.start.plus_days(cell.group * result.period_days);
        const Date time_date =
            result.start.plus_days(cell.time * result.period_days);
        out << group_date.iso() << "," << time_date.iso() << ","
            << cell.time - cell.group << "," << csv::format_number(cell.att)
            << "," << csv::format_number(cell.se) << ","
            << csv::format_number(cell.att - bands.half_width[c]) << ","
            << csv::format_number(cell.att + bands.half_width[c]) << "\n";
      }

      const auto dynamic = aggregate_dynamic(result);
      std::ofstream dyn(out_path(args, "dynamic.csv", manifest),
                        std::ios::binary);
      dyn << "event_time,estimate,se,band_lo,band_hi\n";
      for (const auto& effect : dynamic) {
        const double half = 1.959963984540054 * effect.se;
        dyn << effect.event_time << "," << csv::format_number(effect.estimate)
            << "," << csv::format_number(effect.se) << ","
            << csv::format_number(effect.estimate - half) << ","
            << csv::format_number(effect.estimate + half) << "\n";
      }
    } else {
      throw_error(ErrorCode::ConfigError, "unknown analysis " + analysis);
    }
    manifest.write(out_path(args, "manifest.json", manifest));
    std::cout << "did analysis '" << analysis << "' written to " << args.out_dir
              << "\n";
  });
}

int cmd_grid(const CommonArgs& args) {
  return run_guarded([&] {
    const json config = load_config(args.config_path);
    RunManifest manifest;
    manifest.command = "grid";
    manifest.config_path = args.config_path;
    manifest.seed = args.seed;

    PanelDataset panel = load_panel(config, manifest);
    const std::string family = config.value("family", std::string("case"));
    SensitivityGrid grid =
        family == "death" ? default_death_grid() : default_case_grid();
    grid.columns = columns_from(config);
    grid.tracked_terms = config.value("tracked_terms", grid.tracked_terms);
    grid.jackknife_reps = config.value("jackknife_reps", grid.jackknife_reps);
    grid.ci_level = config.value("ci_level", grid.ci_level);
    grid.seed = derive_seed(args.seed, "grid");
    if (config.contains("estimators")) {
      grid.estimators.clear();
      for (const auto& name : config.at("estimators")) {
        const std::string e = name.get<std::string>();
        grid.estimators.push_back(e == "bc"    ? Estimator::DebiasedBc
                                  : e == "cbc" ? Estimator::DebiasedCbc
                                               : Estimator::PlainFe);
      }
    }
    if (config.contains("variants")) {
      grid.variants.clear();
      for (const auto& v : config.at("variants")) {
        grid.variants.push_back(variant_from(v, family));
      }
    }

    const auto rows = run_grid(panel, grid, args.jobs);
    write_grid_csv(rows, out_path(args, "grid.csv", manifest));
    {
      std::ofstream txt(out_path(args, "grid.txt", manifest), std::ios::binary);
      txt << format_grid_table(rows);
    }
    manifest.write(out_path(args, "manifest.json", manifest));

    int failed = 0;
    for (const auto& row : rows) failed += row.failed ? 1 : 0;
    std::cout << "grid: " << rows.size() << " rows (" << failed << " failed)\n";
  });
}

}  // namespace epipanel::cli
