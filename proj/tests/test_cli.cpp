#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("EPIPANEL_CLI");
  REQUIRE_MESSAGE(env != nullptr, "EPIPANEL_CLI must point at the binary");
  return env;
}

int run(const std::string& command) {
  const int status = std::system((command + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string iso_from_day(int day) {
  // Days offset from 2020-06-01 within June/July/August.
  static const int lengths[3] = {30, 31, 31};
  int month = 6, d = day;
  for (int m = 0; m < 3 && d >= lengths[m]; ++m) {
    d -= lengths[m];
    ++month;
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "2020-%02d-%02d", month, d + 1);
  return buf;
}

}  // namespace

TEST_CASE("cli: simulate, prepare, fit, did, grid round trip with exit codes") {
  testutil::TempDir dir("cli");
  const std::string cli = cli_path();

  // --- simulate -------------------------------------------------------------
  testutil::write_file(dir.file("sim.json"),
                       R"({"n_units": 24, "n_days": 84, "n_states": 6})");
  CHECK(run(cli + " simulate --config " + dir.file("sim.json") + " --out " +
            dir.file("sim") + " --seed 11") == 0);
  CHECK(fs::exists(dir.file("sim") + "/panel.csv"));
  CHECK(fs::exists(dir.file("sim") + "/truth.csv"));
  CHECK(fs::exists(dir.file("sim") + "/manifest.json"));

  // --- prepare with districts -----------------------------------------------
  testutil::write_file(
      dir.file("districts.csv"),
      "district,county,enrollment,open_date,mode,staff_mask\n"
      "d1,C0000,800,2020-05-01,inperson,no\n"
      "d2,C0000,200,2020-05-15,remote,yes\n"
      "d3,C0001,500,2020-05-10,hybrid,yes\n"
      "d4,C0002,400,,unknown,unknown\n"
      "d5,C0002,100,2020-05-12,remote,yes\n");
  testutil::write_file(dir.file("prep.json"),
                       "{\n"
                       "  \"panel_csv\": \"" + dir.file("sim") + "/panel.csv\",\n"
                       "  \"schema\": {\"attr_cols\": [\"state\", \"population\"]},\n"
                       "  \"districts_csv\": \"" + dir.file("districts.csv") + "\"\n"
                       "}");
  CHECK(run(cli + " prepare --config " + dir.file("prep.json") + " --out " +
            dir.file("prep")) == 0);
  CHECK(fs::exists(dir.file("prep") + "/panel.csv"));
  const std::string report =
      testutil::read_file(dir.file("prep") + "/district_report.csv");
  CHECK(report.find("C0000") != std::string::npos);
  // C0002 has 80% unknown enrollment: dropped for mode and mask analysis.
  CHECK(report.find("C0002,500,0.8,0.8,1,1") != std::string::npos);
  const std::string prepared =
      testutil::read_file(dir.file("prep") + "/panel.csv");
  CHECK(prepared.find("case_growth") != std::string::npos);
  CHECK(prepared.find("inperson_share") != std::string::npos);

  // --- fit: estimator flag and failure modes --------------------------------
  testutil::write_file(dir.file("fit.json"),
                       "{\n"
                       "  \"data\": \"" + dir.file("sim") + "/panel.csv\",\n"
                       "  \"schema\": {\"attr_cols\": [\"state\", \"population\"]},\n"
                       "  \"derive\": true,\n"
                       "  \"builder\": {\"family\": \"case\",\n"
                       "    \"columns\": {\"policy_cols\": [\"policy1\"]},\n"
                       "    \"variant\": {\"id\": \"baseline\"}}\n"
                       "}");
  CHECK(run(cli + " fit --config " + dir.file("fit.json") + " --out " +
            dir.file("fit") + " --seed 3 --estimator fe") == 0);
  const std::string fit_csv = testutil::read_file(dir.file("fit") + "/fit.csv");
  CHECK(fit_csv.find("policy1_ma7_lag14") != std::string::npos);
  CHECK(fit_csv.find("estimator,fe") != std::string::npos);

  // Unknown column in the spec: estimation failure, exit 3.
  testutil::write_file(dir.file("fit_bad.json"),
                       "{\n"
                       "  \"data\": \"" + dir.file("sim") + "/panel.csv\",\n"
                       "  \"schema\": {\"attr_cols\": [\"state\", \"population\"]},\n"
                       "  \"derive\": true,\n"
                       "  \"builder\": {\"family\": \"case\",\n"
                       "    \"columns\": {\"policy_cols\": [\"not_a_column\"]},\n"
                       "    \"variant\": {\"id\": \"baseline\"}}\n"
                       "}");
  CHECK(run(cli + " fit --config " + dir.file("fit_bad.json") + " --out " +
            dir.file("fitbad")) == 3);

  // Malformed JSON: config parse failure, exit 4.
  testutil::write_file(dir.file("broken.json"), "{nope");
  CHECK(run(cli + " fit --config " + dir.file("broken.json") + " --out " +
            dir.file("fitbad2")) == 4);

  // carry_forward pins policy columns after a cutoff date.
  testutil::write_file(dir.file("prep_cf.json"),
                       "{\n"
                       "  \"panel_csv\": \"" + dir.file("sim") + "/panel.csv\",\n"
                       "  \"schema\": {\"attr_cols\": [\"state\", \"population\"]},\n"
                       "  \"derive\": false,\n"
                       "  \"carry_forward\": {\"after\": \"2020-05-01\",\n"
                       "                      \"columns\": [\"mask_mandate\"]}\n"
                       "}");
  CHECK(run(cli + " prepare --config " + dir.file("prep_cf.json") + " --out " +
            dir.file("prepcf")) == 0);
  {
    const std::string pinned =
        testutil::read_file(dir.file("prepcf") + "/panel.csv");
    // All post-cutoff rows of one unit carry the same mask_mandate value.
    std::istringstream lines(pinned);
    std::string line;
    std::getline(lines, line);
    std::stringstream header(line);
    int mask_col = -1, col = 0;
    std::string field;
    while (std::getline(header, field, ',')) {
      if (field == "mask_mandate") mask_col = col;
      ++col;
    }
    REQUIRE(mask_col >= 0);
    std::string last_value;
    bool constant_after = true;
    while (std::getline(lines, line)) {
      std::stringstream fields(line);
      std::vector<std::string> parts;
      while (std::getline(fields, field, ',')) parts.push_back(field);
      if (parts[0] != "C0000" || parts[1] < "2020-05-01") continue;
      if (last_value.empty()) last_value = parts[mask_col];
      else if (parts[mask_col] != last_value) constant_after = false;
    }
    CHECK(constant_after);
  }

  // Duplicate panel rows: data validation failure, exit 2.
  testutil::write_file(dir.file("dup.csv"),
                       "unit,date,new_cases,tests\n"
                       "a,2020-04-01,1,10\n"
                       "a,2020-04-01,2,10\n");
  testutil::write_file(dir.file("prep_dup.json"),
                       "{\"panel_csv\": \"" + dir.file("dup.csv") + "\"}");
  CHECK(run(cli + " prepare --config " + dir.file("prep_dup.json") + " --out " +
            dir.file("prepdup")) == 2);

  // --- did: event study on a built-in step ----------------------------------
  std::string did_panel = "unit,date,y,mode,open\n";
  for (int u = 0; u < 8; ++u) {
    const bool treated = u < 4;
    const int open_day = 21 + 7 * (u % 2);
    for (int d = 0; d < 63; ++d) {
      const double value = (treated && d >= open_day) ? 1.0 : 0.0;
      did_panel += "u" + std::to_string(u) + "," + iso_from_day(d) + "," +
                   std::to_string(value) + "," + (treated ? "inperson" : "") +
                   "," + (treated ? iso_from_day(open_day) : "") + "\n";
    }
  }
  testutil::write_file(dir.file("did_panel.csv"), did_panel);
  testutil::write_file(dir.file("did.json"),
                       "{\n"
                       "  \"data\": \"" + dir.file("did_panel.csv") + "\",\n"
                       "  \"schema\": {\"attr_cols\": [\"mode\", \"open\"]},\n"
                       "  \"analysis\": \"event_study\",\n"
                       "  \"outcome\": \"y\",\n"
                       "  \"group_attr\": \"mode\",\n"
                       "  \"opening_attr\": \"open\",\n"
                       "  \"lead_weeks\": 2,\n"
                       "  \"lag_weeks\": 5\n"
                       "}");
  CHECK(run(cli + " did --config " + dir.file("did.json") + " --out " +
            dir.file("did")) == 0);
  const std::string event_csv =
      testutil::read_file(dir.file("did") + "/event_study.csv");
  CHECK(event_csv.find("group,time,event_time,att,se,band_lo,band_hi") !=
        std::string::npos);
  // Post-opening cells show the unit jump, pre-opening cells zero.
  std::istringstream lines(event_csv);
  std::string line;
  std::getline(lines, line);  // header
  int checked = 0;
  while (std::getline(lines, line)) {
    std::stringstream fields(line);
    std::string group, time, event_time, att;
    std::getline(fields, group, ',');
    std::getline(fields, time, ',');
    std::getline(fields, event_time, ',');
    std::getline(fields, att, ',');
    REQUIRE(group == "inperson");
    const double expected = std::stoi(event_time) >= 0 ? 1.0 : 0.0;
    CHECK(std::fabs(std::stod(att) - expected) < 1e-9);
    ++checked;
  }
  CHECK(checked == 8);  // weeks -2..5

  // csdid on the same panel.
  testutil::write_file(dir.file("did2.json"),
                       "{\n"
                       "  \"data\": \"" + dir.file("did_panel.csv") + "\",\n"
                       "  \"schema\": {\"attr_cols\": [\"mode\", \"open\"]},\n"
                       "  \"analysis\": \"csdid\",\n"
                       "  \"outcome\": \"y\",\n"
                       "  \"opening_attr\": \"open\",\n"
                       "  \"period_days\": 7,\n"
                       "  \"bootstrap_draws\": 200\n"
                       "}");
  CHECK(run(cli + " did --config " + dir.file("did2.json") + " --out " +
            dir.file("did2") + " --seed 5") == 0);
  CHECK(fs::exists(dir.file("did2") + "/att.csv"));
  CHECK(fs::exists(dir.file("did2") + "/dynamic.csv"));

  // Rerun csdid with the same seed: byte-identical results, and the manifest
  // reports the same input hashes (only its timestamp may differ).
  CHECK(run(cli + " did --config " + dir.file("did2.json") + " --out " +
            dir.file("did3") + " --seed 5") == 0);
  CHECK(testutil::read_file(dir.file("did2") + "/att.csv") ==
        testutil::read_file(dir.file("did3") + "/att.csv"));
  auto inputs_block = [](const std::string& manifest) {
    const auto start = manifest.find("\"inputs\"");
    const auto end = manifest.find('}', start);
    return manifest.substr(start, end - start);
  };
  const std::string hash_a =
      inputs_block(testutil::read_file(dir.file("did2") + "/manifest.json"));
  CHECK(hash_a ==
        inputs_block(testutil::read_file(dir.file("did3") + "/manifest.json")));
  CHECK(hash_a.find("did_panel.csv") != std::string::npos);

  // --- grid ------------------------------------------------------------------
  testutil::write_file(dir.file("grid.json"),
                       "{\n"
                       "  \"data\": \"" + dir.file("sim") + "/panel.csv\",\n"
                       "  \"schema\": {\"attr_cols\": [\"state\", \"population\"]},\n"
                       "  \"family\": \"case\",\n"
                       "  \"columns\": {\"policy_cols\": [\"policy1\"]},\n"
                       "  \"tracked_terms\": [\"policy1\"],\n"
                       "  \"estimators\": [\"fe\"]\n"
                       "}");
  CHECK(run(cli + " grid --config " + dir.file("grid.json") + " --out " +
            dir.file("grid") + " --seed 9 --jobs 2") == 0);
  const std::string grid_csv = testutil::read_file(dir.file("grid") + "/grid.csv");
  // Header + 8 variants x 1 estimator x 1 tracked term.
  CHECK(std::count(grid_csv.begin(), grid_csv.end(), '\n') == 9);
}

TEST_CASE("cli: unparseable opening attribute exits as data validation") {
  testutil::TempDir dir("clifail");
  const std::string cli = cli_path();
  testutil::write_file(dir.file("sim.json"),
                       R"({"n_units": 10, "n_days": 35, "n_states": 3})");
  REQUIRE(run(cli + " simulate --config " + dir.file("sim.json") + " --out " +
              dir.file("sim") + " --seed 31") == 0);
  testutil::write_file(dir.file("did.json"),
                       "{\n"
                       "  \"data\": \"" + dir.file("sim") + "/panel.csv\",\n"
                       "  \"schema\": {\"attr_cols\": [\"state\", \"population\"]},\n"
                       "  \"analysis\": \"csdid\",\n"
                       "  \"outcome\": \"new_cases\",\n"
                       "  \"opening_attr\": \"state\"\n"
                       "}");
  CHECK(run(cli + " did --config " + dir.file("did.json") + " --out " +
            dir.file("didbad")) == 2);
}
