#include "cbc/cli/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <stdexcept>

#include "cbc/errors.hpp"

namespace cbc {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr)) throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::int64_t report_clock() {
  if (const char* s = std::getenv("SOURCE_DATE_EPOCH"); s && *s) {
    try {
      return std::stoll(s);
    } catch (const std::exception&) {
      throw Error(std::string("SOURCE_DATE_EPOCH is not an integer: ") + s);
    }
  }
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

std::string iso8601_utc(std::int64_t epoch_seconds) {
  std::time_t t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunManifest::add_input(const std::string& path, const std::string& contents) {
  inputs.push_back({path, sha256_hex(contents)});
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& i : m.inputs) inputs.push_back({{"path", i.path}, {"sha256", i.sha256}});
  return {{"tool", "cbcforge"},
          {"tool_version", m.tool_version},
          {"command", m.command},
          {"config", m.config},
          {"inputs", inputs},
          {"seed", m.seed},
          {"timestamps", {{"started", iso8601_utc(m.started)}, {"finished", iso8601_utc(m.finished)}}}};
}

nlohmann::json wrap_report(const RunManifest& m, const nlohmann::json& payload) {
  nlohmann::json out = {{"format_version", kFormatVersion}, {"manifest", to_json(m)}};
  for (auto it = payload.begin(); it != payload.end(); ++it) out[it.key()] = it.value();
  return out;
}

}  // namespace cbc
