#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace modclass {

/// Lower-case hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_sha256;
  std::uint64_t seed = 0;
  bool fast = false;
  int workers = 0;
  std::string version;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;

  std::string to_json() const;
  /// Written through a temporary file and renamed into place.
  void write(const std::filesystem::path& path) const;
};

}  // namespace modclass
