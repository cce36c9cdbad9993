// CSV output: UTF-8, comma-separated, one header row, newline-terminated
// rows. Numbers use fixed decimal notation with 17 significant digits so
// files round-trip bit-for-bit and diffs are stable across runs.

#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "qsg/dynamics.hpp"
#include "qsg/protocol.hpp"

namespace qsg {

inline constexpr int kCsvSchemaVersion = 1;

// Fixed-point rendering with 17 significant digits; "nan"/"inf" for
// non-finite values.
std::string csv_number(double value);
std::string csv_number(long value);

class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, std::vector<std::string> columns);

  void row(std::span<const std::string> cells);
  void close();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t arity_;
  std::ofstream out_;
};

// Estimate-export schema: name, value, std_error, n, config_hash. Any
// EstimateWithError can be written as one such row keyed to the digest of
// the config that produced it.
std::vector<std::string> estimate_columns();
std::vector<std::string> estimate_row(const std::string& name, double value,
                                      double std_error, long n,
                                      const std::string& config_hash);

// Trajectory schema: step, provenance, U, V, q, S, H, M, p_max, mean_0..K-1.
std::vector<std::string> trajectory_columns(int label_count);
std::vector<std::string> trajectory_row(long step, const std::string& provenance,
                                        const ObservableRecord& record);

void write_trajectory_csv(CsvWriter& writer, const Trajectory& trajectory);
// Two rows per probe: provenance "exact" then "probe".
void write_nnd_trajectory_csv(CsvWriter& writer, const NndTrajectory& trajectory);

}  // namespace qsg
