#include "qsg/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qsg/csv.hpp"

namespace qsg {

namespace {

std::string finish_hex(EVP_MD_CTX* ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &length);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

EVP_MD_CTX* new_sha256_ctx() {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("digest context allocation failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  return ctx;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  EVP_MD_CTX* ctx = new_sha256_ctx();
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  return finish_hex(ctx);
}

std::string sha256_file_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file for digest: " + path.string());
  EVP_MD_CTX* ctx = new_sha256_ctx();
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (in.gcount() > 0)
      EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  return finish_hex(ctx);
}

std::string config_digest(const std::map<std::string, std::string>& config_echo) {
  std::string canonical;
  for (const auto& [key, value] : config_echo) {
    canonical += key;
    canonical += " = ";
    canonical += value;
    canonical += '\n';
  }
  return sha256_hex(canonical);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string build_identifier() {
  return std::string("qsg-lab 1.0.0 (") + __VERSION__ + ")";
}

void RunManifest::add_output(const std::filesystem::path& path) {
  outputs.push_back({path.filename().string(), sha256_file_hex(path)});
}

void RunManifest::write(const std::filesystem::path& path) const {
  nlohmann::json doc;
  doc["schema_version"] = kManifestSchemaVersion;
  doc["csv_schema_version"] = kCsvSchemaVersion;
  doc["command"] = command;
  doc["build"] = build_identifier();
  doc["master_seed"] = master_seed;
  doc["trials"] = trials;
  doc["workers"] = workers;
  doc["started_utc"] = started_utc;
  doc["finished_utc"] = finished_utc;
  doc["config"] = config_echo;
  doc["config_sha256"] = config_digest(config_echo);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& out : outputs) {
    files.push_back({{"name", out.name}, {"sha256", out.sha256}});
  }
  doc["outputs"] = files;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace qsg
