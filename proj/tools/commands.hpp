#pragma once

#include <cstdint>
#include <string>

namespace epipanel::cli {

// Shared flags; subcommand configs come from the JSON file.
struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::string estimator_override;  // fit only: fe | bc | cbc
  int jobs = 1;
};

// Exit codes: 0 success, 2 data validation, 3 estimation, 4 config parse.
int cmd_prepare(const CommonArgs& args);
int cmd_fit(const CommonArgs& args);
int cmd_simulate(const CommonArgs& args);
int cmd_did(const CommonArgs& args);
int cmd_grid(const CommonArgs& args);

}  // namespace epipanel::cli
