#include "epipanel/districts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "epipanel/csv.hpp"
#include "epipanel/errors.hpp"

namespace epipanel {

const char* teaching_mode_name(TeachingMode mode) {
  switch (mode) {
    case TeachingMode::InPerson: return "inperson";
    case TeachingMode::Hybrid: return "hybrid";
    case TeachingMode::Remote: return "remote";
    case TeachingMode::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

TeachingMode parse_mode(const std::string& text, std::size_t row) {
  if (text == "inperson") return TeachingMode::InPerson;
  if (text == "hybrid") return TeachingMode::Hybrid;
  if (text == "remote") return TeachingMode::Remote;
  if (text == "unknown" || text == "pending" || text.empty())
    return TeachingMode::Unknown;
  throw_error(ErrorCode::NonNumericValue,
              "row " + std::to_string(row) + " mode '" + text + "'");
}

MaskPolicy parse_mask(const std::string& text, std::size_t row) {
  if (text == "yes") return MaskPolicy::Required;
  if (text == "no") return MaskPolicy::NotRequired;
  if (text == "unknown" || text == "pending" || text.empty())
    return MaskPolicy::Unknown;
  throw_error(ErrorCode::NonNumericValue,
              "row " + std::to_string(row) + " staff_mask '" + text + "'");
}

}  // namespace

std::vector<DistrictRecord> load_districts_csv(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  const char* required[] = {"district", "county",       "enrollment",
                            "open_date", "mode",        "staff_mask"};
  int cols[6];
  for (int i = 0; i < 6; ++i) {
    cols[i] = table.column(required[i]);
    if (cols[i] < 0) throw_error(ErrorCode::MissingColumn, required[i]);
  }

  std::vector<DistrictRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    DistrictRecord rec;
    rec.district_id = row[cols[0]];
    rec.county_id = row[cols[1]];
    char* end = nullptr;
    rec.enrollment = std::strtod(row[cols[2]].c_str(), &end);
    if (end == row[cols[2]].c_str() || *end != '\0') {
      throw_error(ErrorCode::NonNumericValue,
                  "row " + std::to_string(r + 2) + " enrollment '" +
                      row[cols[2]] + "'");
    }
    if (rec.enrollment < 0) {
      throw_error(ErrorCode::NegativeCount,
                  "row " + std::to_string(r + 2) + " enrollment");
    }
    if (!row[cols[3]].empty()) {
      const auto date = Date::parse_iso(row[cols[3]]);
      if (!date) {
        throw_error(ErrorCode::UnparseableDate,
                    "row " + std::to_string(r + 2) + " open_date '" +
                        row[cols[3]] + "'");
      }
      rec.opening_date = *date;
    }
    rec.mode = parse_mode(row[cols[4]], r + 2);
    rec.staff_mask = parse_mask(row[cols[5]], r + 2);
    records.push_back(std::move(rec));
  }
  return records;
}

TeachingMode classify_dominant_mode(const std::array<double, 3>& shares) {
  for (double s : shares) {
    if (s < 0) throw_error(ErrorCode::ConfigError, "shares must be nonnegative");
  }
  if (shares[0] == 0.0 && shares[1] == 0.0 && shares[2] == 0.0) {
    throw_error(ErrorCode::AllSharesZero, "no students under any known mode");
  }
  // Priority order doubles as the tie-break.
  int best = 0;
  for (int m = 1; m < 3; ++m) {
    if (shares[m] > shares[best]) best = m;
  }
  return static_cast<TeachingMode>(best);
}

DistrictAggregation aggregate_districts(const std::vector<DistrictRecord>& records,
                                        const Calendar& calendar) {
  std::vector<std::string> counties;
  std::map<std::string, std::vector<const DistrictRecord*>> by_county;
  for (const auto& rec : records) {
    auto [it, inserted] = by_county.try_emplace(rec.county_id);
    if (inserted) counties.push_back(rec.county_id);
    it->second.push_back(&rec);
  }
  // Keep first-appearance order for the output panel.
  PanelDataset panel(counties, calendar.start, calendar.n_days);

  const std::size_t n_rows = panel.n_rows();
  Series share[3] = {Series(n_rows, 0.0), Series(n_rows, 0.0), Series(n_rows, 0.0)};
  Series unknown_share(n_rows, 0.0);
  Series no_mask(n_rows, 0.0);

  std::vector<CountyReport> reports;
  std::vector<std::string> dominant(counties.size());
  std::vector<std::string> open_attr(counties.size());
  std::vector<std::string> dropped_mode(counties.size());
  std::vector<std::string> dropped_mask(counties.size());

  for (std::size_t c = 0; c < counties.size(); ++c) {
    const auto& districts = by_county[counties[c]];
    CountyReport report;
    report.county_id = counties[c];
    for (const auto* d : districts) report.total_enrollment += d->enrollment;
    if (report.total_enrollment <= 0.0) {
      throw_error(ErrorCode::ZeroEnrollmentCounty, counties[c]);
    }

    double unknown_mode_enroll = 0.0, unknown_mask_enroll = 0.0;
    double mode_enroll[3] = {0, 0, 0};
    double dated_weight[3] = {0, 0, 0}, dated_sum[3] = {0, 0, 0};
    double all_dated_weight = 0.0, all_dated_sum = 0.0;
    for (const auto* d : districts) {
      if (d->mode == TeachingMode::Unknown) {
        unknown_mode_enroll += d->enrollment;
      } else {
        mode_enroll[static_cast<int>(d->mode)] += d->enrollment;
      }
      if (d->staff_mask == MaskPolicy::Unknown) {
        unknown_mask_enroll += d->enrollment;
      } else if (d->staff_mask == MaskPolicy::NotRequired) {
        report.no_mask = 1;
      }
      if (d->opening_date) {
        const double serial = static_cast<double>(d->opening_date->serial());
        all_dated_weight += d->enrollment;
        all_dated_sum += d->enrollment * serial;
        if (d->mode != TeachingMode::Unknown) {
          dated_weight[static_cast<int>(d->mode)] += d->enrollment;
          dated_sum[static_cast<int>(d->mode)] += d->enrollment * serial;
        }
      }
    }

    report.unknown_mode_share = unknown_mode_enroll / report.total_enrollment;
    report.unknown_mask_share = unknown_mask_enroll / report.total_enrollment;
    report.dropped_mode_analysis = report.unknown_mode_share > 0.5;
    report.dropped_mask_analysis = report.unknown_mask_share > 0.5;
    for (int m = 0; m < 3; ++m) {
      report.mode_enrollment_share[m] = mode_enroll[m] / report.total_enrollment;
      report.weighted_open_serial[m] =
          dated_weight[m] > 0 ? dated_sum[m] / dated_weight[m] : kMissing;
    }
    if (all_dated_weight > 0) {
      report.county_open_serial = all_dated_sum / all_dated_weight;
      report.has_open_date = true;
    } else {
      report.county_open_serial = kMissing;
    }
    const bool any_known_mode =
        mode_enroll[0] + mode_enroll[1] + mode_enroll[2] > 0.0;
    report.dominant_mode =
        any_known_mode
            ? teaching_mode_name(classify_dominant_mode(report.mode_enrollment_share))
            : "";

    // Daily open shares: a district contributes to its mode from its opening
    // date onward; before opening (or with no date) it contributes to no mode.
    for (int day = 0; day < calendar.n_days; ++day) {
      const std::size_t idx = panel.row_index(static_cast<int>(c), day);
      const Date today = calendar.start.plus_days(day);
      double open_enroll[3] = {0, 0, 0};
      for (const auto* d : districts) {
        if (d->mode == TeachingMode::Unknown || !d->opening_date) continue;
        if (*d->opening_date <= today) {
          open_enroll[static_cast<int>(d->mode)] += d->enrollment;
        }
      }
      for (int m = 0; m < 3; ++m) {
        share[m][idx] = open_enroll[m] / report.total_enrollment;
      }
      unknown_share[idx] = report.unknown_mode_share;
      no_mask[idx] = report.no_mask;
    }

    dominant[c] = report.dominant_mode;
    open_attr[c] = report.has_open_date
                       ? Date(static_cast<std::int64_t>(
                                  std::llround(report.county_open_serial)))
                             .iso()
                       : "";
    dropped_mode[c] = report.dropped_mode_analysis ? "1" : "0";
    dropped_mask[c] = report.dropped_mask_analysis ? "1" : "0";
    reports.push_back(std::move(report));
  }

  panel.add_series("inperson_share", std::move(share[0]));
  panel.add_series("hybrid_share", std::move(share[1]));
  panel.add_series("remote_share", std::move(share[2]));
  panel.add_series("unknown_share", std::move(unknown_share));
  panel.add_series("no_mask", std::move(no_mask));
  panel.add_unit_attr("dominant_mode", std::move(dominant));
  panel.add_unit_attr("opening_date", std::move(open_attr));
  panel.add_unit_attr("dropped_mode", std::move(dropped_mode));
  panel.add_unit_attr("dropped_mask", std::move(dropped_mask));

  return {std::move(panel), std::move(reports)};
}

}  // namespace epipanel
