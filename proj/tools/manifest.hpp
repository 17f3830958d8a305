#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace epipanel::cli {

// One manifest per run: what ran, with which inputs (content-hashed), and
// what it wrote. The timestamp is the only field that varies between
// identical reruns; result files themselves are byte-stable.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> input_hashes;
  std::vector<std::string> outputs;

  void add_input(const std::string& path);
  void write(const std::string& path) const;
};

}  // namespace epipanel::cli
