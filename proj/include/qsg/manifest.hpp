// Run manifests: every data file is paired with a JSON manifest recording
// the schema version, the full config echo, the master seed, a build
// identifier, wall-clock bounds, and a content digest per output. Digests
// cover only the data files, so timestamps never break reproducibility.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qsg {

inline constexpr int kManifestSchemaVersion = 1;

struct OutputFileRecord {
  std::string name;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config_echo;
  std::uint64_t master_seed = 0;
  long trials = 0;
  unsigned workers = 0;
  std::string started_utc;
  std::string finished_utc;
  std::vector<OutputFileRecord> outputs;

  void add_output(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file_hex(const std::filesystem::path& path);
std::string utc_timestamp();
std::string build_identifier();

// Digest of the canonical `key = value` rendering of a config echo; lets
// exported estimate rows point back at the exact configuration.
std::string config_digest(const std::map<std::string, std::string>& config_echo);

}  // namespace qsg
