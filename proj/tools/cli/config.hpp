#pragma once

// YAML scenario schedules and fit settings.

#include "greenprem/errors.hpp"
#include "greenprem/fitting.hpp"
#include "greenprem/trajectory.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace greenprem::cli {

struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};

ScenarioSchedule parse_schedule_yaml(const std::string& text, const std::string& source);
ScenarioSchedule load_schedule_file(const std::string& path);
std::string emit_schedule_yaml(const ScenarioSchedule& schedule);

nlohmann::ordered_json schedule_to_json(const ScenarioSchedule& schedule);

/// Config directory from the flag, else GREENPREM_CONFIG_DIR, else none.
std::optional<std::string> config_dir(const std::string& flag_value);

/// A reference naming a .yaml/.yml file is loaded directly; a bare name is
/// looked up as <dir>/<name>.yaml when a config directory is set, and
/// otherwise as a built-in schedule ("long-range", "short-range").
ScenarioSchedule resolve_schedule_ref(const std::string& ref, const std::optional<std::string>& dir);

/// Overlays keys from a YAML mapping onto `cfg`. Keys mirror FitConfig field names.
FitConfig load_fit_config(const std::string& path, FitConfig cfg);

nlohmann::ordered_json fit_config_to_json(const FitConfig& cfg);

} // namespace greenprem::cli
