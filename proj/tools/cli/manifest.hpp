#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace wwcli {

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestInput {
  const ScenarioConfig* config = nullptr;
  std::vector<std::string> files;
  bool aborted = false;
  double last_good_time = 0.0;
  std::string abort_reason;
  std::string error;  // set when the run stopped on an exception
};

nlohmann::ordered_json build_manifest(const std::filesystem::path& dir, const ManifestInput& in);
// Writes manifest.json into `dir`.
void write_manifest(const std::filesystem::path& dir, const ManifestInput& in);

}  // namespace wwcli
