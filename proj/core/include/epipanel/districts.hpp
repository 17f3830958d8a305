#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "epipanel/date.hpp"
#include "epipanel/panel.hpp"

namespace epipanel {

enum class TeachingMode { InPerson = 0, Hybrid = 1, Remote = 2, Unknown = 3 };
enum class MaskPolicy { Required, NotRequired, Unknown };

const char* teaching_mode_name(TeachingMode mode);

struct DistrictRecord {
  std::string district_id;
  std::string county_id;
  double enrollment = 0.0;  // >= 0
  std::optional<Date> opening_date;
  TeachingMode mode = TeachingMode::Unknown;
  MaskPolicy staff_mask = MaskPolicy::Unknown;
};

// CSV columns: district,county,enrollment,open_date,mode,staff_mask with
// mode in {inperson,hybrid,remote,unknown} and staff_mask in {yes,no,unknown}.
// "pending" is accepted as a synonym for unknown in both fields.
std::vector<DistrictRecord> load_districts_csv(const std::string& path);

// argmax over (in-person, hybrid, remote) shares; ties broken by the fixed
// priority in-person > hybrid > remote.
TeachingMode classify_dominant_mode(const std::array<double, 3>& shares);

struct CountyReport {
  std::string county_id;
  double total_enrollment = 0.0;
  double unknown_mode_share = 0.0;
  double unknown_mask_share = 0.0;
  bool dropped_mode_analysis = false;  // unknown mode share > 0.5
  bool dropped_mask_analysis = false;  // unknown mask share > 0.5
  int no_mask = 0;  // 1 if >= 1 district reports staff masks not required
  // Enrollment share of students in districts planning each mode, and the
  // within-mode enrollment-weighted mean opening date (fractional serial;
  // missing when no district of that mode reports a date).
  std::array<double, 3> mode_enrollment_share{0.0, 0.0, 0.0};
  std::array<double, 3> weighted_open_serial{};
  // Weighted mean opening date across all dated districts.
  double county_open_serial = 0.0;
  bool has_open_date = false;
  std::string dominant_mode;  // empty when all mode shares are zero
};

struct DistrictAggregation {
  // Units are counties (order of first appearance). Series:
  //   inperson_share, hybrid_share, remote_share: enrollment share of students
  //     attending an opened district of that mode on each day;
  //   unknown_share: constant share in unknown/pending districts;
  //   no_mask: constant 0/1 indicator.
  // Unit attributes: dominant_mode, opening_date (ISO of the rounded weighted
  // county opening date), dropped_mode, dropped_mask.
  PanelDataset panel;
  std::vector<CountyReport> reports;
};

struct Calendar {
  Date start;
  int n_days = 0;
};

DistrictAggregation aggregate_districts(const std::vector<DistrictRecord>& records,
                                        const Calendar& calendar);

}  // namespace epipanel
