#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "epipanel/errors.hpp"
#include "epipanel/rng.hpp"

namespace epipanel::cli {

void RunManifest::add_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  char hex[24];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(content)));
  input_hashes.emplace_back(path, hex);
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config_path;
  j["seed"] = seed;
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  j["timestamp"] = stamp;
  j["inputs"] = nlohmann::json::object();
  for (const auto& [file, hash] : input_hashes) j["inputs"][file] = hash;
  j["outputs"] = outputs;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace epipanel::cli
