#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace cbc {

inline constexpr int kFormatVersion = 1;

std::string sha256_hex(const std::string& bytes);

/// Seconds since the epoch: SOURCE_DATE_EPOCH when set, otherwise now.
std::int64_t report_clock();
std::string iso8601_utc(std::int64_t epoch_seconds);

struct InputDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string tool_version;
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<InputDigest> inputs;
  std::uint64_t seed = 0;
  std::int64_t started = 0;
  std::int64_t finished = 0;

  void add_input(const std::string& path, const std::string& contents);
};

nlohmann::json to_json(const RunManifest& m);

/// {"format_version", "manifest", ...payload}
nlohmann::json wrap_report(const RunManifest& m, const nlohmann::json& payload);

}  // namespace cbc
