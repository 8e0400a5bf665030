#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "modclass/divergence.hpp"
#include "modclass/experiments.hpp"

namespace modclass {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the experiment file format into a JSON object: top-level keys, one
/// nested object per [section]. Supports strings, integers, floats, booleans,
/// single-line arrays and # comments.
nlohmann::json parse_config_text(std::string_view text, std::string_view source = "<config>");

// Settings for the kl-certify diagnostic.
struct KlSettings {
  std::int64_t samples = 100000;
  std::int64_t alrt_samples = 10000;
  int alrt_length = 2;
  std::vector<double> scan_amplitudes{0.5, 1.0, 1.5};
  std::vector<double> scan_phases{0.0, 0.2, 0.4};
  std::vector<double> scan_noise{0.05, 0.1, 0.2};
  double margin = 3.0;  // certified when value > margin * std_error
};

struct ConfigFile {
  ExperimentConfig experiment;
  KlSettings kl;
  std::string text;  // raw bytes, for hashing
  std::filesystem::path path;
};

/// Maps a parsed document onto the configuration types. Unknown sections or
/// keys and out-of-range values raise ConfigError. The experiment part is not
/// validated here because kl-certify does not need a sweep.
ConfigFile config_from_json(const nlohmann::json& doc, std::string_view source = "<config>");

ConfigFile load_config(const std::filesystem::path& path);

}  // namespace modclass
