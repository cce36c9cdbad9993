#include "qsg/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace qsg {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

double parse_number(const std::string& text, bool& ok) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  double value = 0.0;
  const auto result = std::from_chars(begin, end, value);
  ok = result.ec == std::errc() && result.ptr == end;
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path.string());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text,
                                            const std::string& source_name) {
  KeyValueConfig config;
  config.source_ = source_name;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": empty key");
    if (config.entries_.count(key))
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": duplicate field '" +
                        key + "'");
    config.entries_[key] = {value, line_no};
    config.raw_[key] = value;
  }
  return config;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

void KeyValueConfig::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(source_ + ": missing required field '" + key + "'");
  }
  throw ConfigError(source_ + ":" + std::to_string(it->second.line) + ": field '" + key +
                    "' " + message);
}

const KeyValueConfig::Entry& KeyValueConfig::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(key, "");
  return it->second;
}

std::int64_t KeyValueConfig::require_int(const std::string& key) const {
  const std::string& text = entry(key).value;
  std::int64_t value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size())
    fail(key, "must be an integer, got '" + text + "'");
  return value;
}

double KeyValueConfig::require_double(const std::string& key) const {
  const std::string& text = entry(key).value;
  bool ok = false;
  const double value = parse_number(text, ok);
  if (!ok) fail(key, "must be a number, got '" + text + "'");
  return value;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
  return entry(key).value;
}

std::vector<double> KeyValueConfig::require_list(const std::string& key) const {
  const std::string& text = entry(key).value;
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    fail(key, "must be a bracketed list like [1, 2, 3], got '" + text + "'");
  std::vector<double> values;
  std::string body = text.substr(1, text.size() - 2);
  std::istringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(key, "contains an empty list element");
    bool ok = false;
    const double v = parse_number(item, ok);
    if (!ok) fail(key, "list element '" + item + "' is not a number");
    values.push_back(v);
  }
  return values;
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? require_int(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? require_double(key) : fallback;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return has(key) ? require_string(key) : fallback;
}

}  // namespace qsg
