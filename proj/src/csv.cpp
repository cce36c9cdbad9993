#include "qsg/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace qsg {

std::string csv_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char sci[64];
  std::snprintf(sci, sizeof sci, "%.16e", value);
  const char* e = std::strchr(sci, 'e');
  const int exp10 = std::atoi(e + 1);
  int decimals = 16 - exp10;
  if (decimals < 0) decimals = 0;
  char out[512];
  std::snprintf(out, sizeof out, "%.*f", decimals, value);
  return out;
}

std::string csv_number(long value) { return std::to_string(value); }

CsvWriter::CsvWriter(std::filesystem::path path, std::vector<std::string> columns)
    : path_(std::move(path)), arity_(columns.size()) {
  out_.open(path_, std::ios::binary);
  if (!out_) throw std::runtime_error("cannot open output file: " + path_.string());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ',';
    out_ << columns[i];
  }
  out_ << '\n';
}

void CsvWriter::row(std::span<const std::string> cells) {
  if (cells.size() != arity_)
    throw std::logic_error("csv row arity mismatch in " + path_.string());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  if (out_.is_open()) {
    out_.flush();
    out_.close();
    if (!out_.good()) throw std::runtime_error("failed writing " + path_.string());
  }
}

std::vector<std::string> estimate_columns() {
  return {"name", "value", "std_error", "n", "config_hash"};
}

std::vector<std::string> estimate_row(const std::string& name, double value,
                                      double std_error, long n,
                                      const std::string& config_hash) {
  return {name, csv_number(value), csv_number(std_error), csv_number(n), config_hash};
}

std::vector<std::string> trajectory_columns(int label_count) {
  std::vector<std::string> cols = {"step", "provenance", "U", "V", "q",
                                   "S",    "H",          "M", "p_max"};
  for (int k = 0; k < label_count; ++k) cols.push_back("mean_" + std::to_string(k));
  return cols;
}

std::vector<std::string> trajectory_row(long step, const std::string& provenance,
                                        const ObservableRecord& record) {
  std::vector<std::string> cells = {
      csv_number(step),
      provenance,
      csv_number(record.polarization),
      csv_number(record.disagreement),
      csv_number(record.self_overlap),
      csv_number(record.coordination),
      csv_number(record.entropy),
      csv_number(record.magnetization),
      csv_number(record.p_max),
  };
  for (int k = 0; k < record.mean.label_count(); ++k) cells.push_back(csv_number(record.mean[k]));
  return cells;
}

void write_trajectory_csv(CsvWriter& writer, const Trajectory& trajectory) {
  for (const auto& probe : trajectory.probes) {
    writer.row(trajectory_row(probe.step, "exact", probe.record));
  }
}

void write_nnd_trajectory_csv(CsvWriter& writer, const NndTrajectory& trajectory) {
  for (const auto& probe : trajectory.probes) {
    writer.row(trajectory_row(probe.step, "exact", probe.exact));
    writer.row(trajectory_row(probe.step, "probe", probe.estimated));
  }
}

}  // namespace qsg
