#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "papc/cellnet.hpp"

namespace papc {

inline constexpr int kScenarioFormatVersion = 1;

/// Canonical JSON text of a scenario (sorted keys, shortest round-trip
/// decimals), so save -> load -> save reproduces the same bytes.
std::string scenario_to_json(const Scenario& scenario);

/// Throws ConfigError on malformed content or an unsupported version.
Scenario scenario_from_json(std::string_view text);

/// Throws IoError when the file cannot be written.
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Throws IoError when the file cannot be read, ConfigError when it is
/// not a valid scenario.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace papc
