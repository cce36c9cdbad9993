// Flat key/value experiment configs: `key = value` lines, `#` comments,
// bracketed numeric lists. Typed getters report the offending field and
// line in every error, so config mistakes surface as actionable messages.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::filesystem::path& path);
  static KeyValueConfig parse_string(const std::string& text,
                                     const std::string& source_name = "<config>");

  bool has(const std::string& key) const;

  std::int64_t require_int(const std::string& key) const;
  double require_double(const std::string& key) const;
  std::string require_string(const std::string& key) const;
  std::vector<double> require_list(const std::string& key) const;

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  // Raw key -> value text, insertion-ordered by key; echoed into manifests.
  const std::map<std::string, std::string>& raw() const { return raw_; }
  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    int line;
  };

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  const Entry& entry(const std::string& key) const;

  std::map<std::string, Entry> entries_;
  std::map<std::string, std::string> raw_;
  std::string source_;
};

}  // namespace qsg
