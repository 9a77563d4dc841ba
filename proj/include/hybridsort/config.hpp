#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hybridsort/simulator.hpp"
#include "hybridsort/tracker.hpp"

namespace hybridsort {

// Run configuration file.
//
//   # comment
//   schema_version = 1
//   tracker.gate = 0.15
//   noise.measurement_std = 1, 1, 3.16, 0.1, 3.16
//   scenario.seed = 42
//   run.dets = seq/det/det.txt
//
// Keys are grouped by prefix: tracker.*, noise.*, scenario.* map onto TrackerConfig,
// NoiseConfig and ScenarioSpec; run.* entries are free-form strings kept verbatim (run
// manifests store paths, seed, version and timing there). Missing keys keep their defaults.
// Unknown keys under a known prefix are rejected.

inline constexpr int kConfigSchemaVersion = 1;

struct ConfigDocument {
  TrackerConfig tracker;
  ScenarioSpec scenario;
  std::map<std::string, std::string> run;  // keys without the "run." prefix
};

/// Applies one `key = value` setting. Throws InputError on unknown keys or bad values.
void apply_setting(ConfigDocument& doc, std::string_view key, std::string_view value);

/// Every settable key except run.*, in file order.
[[nodiscard]] std::vector<std::string> config_keys();

[[nodiscard]] ConfigDocument parse_config(std::istream& in, std::string_view source = "<stream>");
[[nodiscard]] ConfigDocument read_config(const std::filesystem::path& path);

/// Full dump of every key; parse_config(format_config(d)) == d.
[[nodiscard]] std::string format_config(const ConfigDocument& doc);

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double x);

[[nodiscard]] bool parse_bool(std::string_view text);
[[nodiscard]] double parse_double(std::string_view text);
[[nodiscard]] long long parse_integer(std::string_view text);

}  // namespace hybridsort
