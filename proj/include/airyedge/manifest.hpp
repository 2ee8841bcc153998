#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"

namespace airyedge::manifest {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

// temp-then-rename so partially written artifacts never appear
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Records a run: command, parameters, seed, tool version, and digests of the
// files read and written. Re-running a manifest in single-stream mode must
// reproduce outputs bit-exactly.
struct RunManifest {
  explicit RunManifest(std::string cmd);

  std::string command;
  nlohmann::json params;
  uint64_t seed = 0;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;

  void add_input(const std::filesystem::path& p);
  void add_output(const std::filesystem::path& p);
  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace airyedge::manifest
