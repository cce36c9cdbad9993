// Config-driven experiment commands behind the CLI: single runs, parameter
// sweeps with theory overlay columns, drift-identity reports, and fixation
// grids. Each command writes CSV data plus a paired manifest and returns a
// process exit code (0 ok, 1 config error, 2 runtime error).

#pragma once

#include <filesystem>
#include <optional>

#include "qsg/config.hpp"
#include "qsg/dynamics.hpp"

namespace qsg {

struct CliOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  std::optional<long> trials_override;
  unsigned workers = 0;  // 0 = QSG_WORKERS env or hardware concurrency
};

// Builds the simulation config from parsed key/values (shared field names
// across commands); throws ConfigError on any invalid field.
SimConfig sim_config_from(const KeyValueConfig& kv);

int cmd_run(const CliOptions& options);
int cmd_sweep(const CliOptions& options);
int cmd_drift_check(const CliOptions& options);
int cmd_fixation(const CliOptions& options);

// Full argv dispatch used by the binary (and by tests).
int run_cli(int argc, const char* const* argv);

}  // namespace qsg
