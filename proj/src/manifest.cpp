#include "modclass/manifest.hpp"

#include <openssl/evp.h>

#include <ctime>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "modclass/report.hpp"

namespace modclass {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("sha256: digest computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json() const {
  const nlohmann::ordered_json j = {
      {"command", command},        {"config_path", config_path}, {"config_sha256", config_sha256},
      {"seed", seed},              {"fast", fast},               {"workers", workers},
      {"version", version},        {"started_at", started_at},   {"finished_at", finished_at},
      {"outputs", outputs},
  };
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const { write_file_atomic(path, to_json()); }

}  // namespace modclass
