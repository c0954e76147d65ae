#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "trustnav/scenario.hpp"

namespace trustnav {

/// Parses and fully validates a scenario config file (JSON). Missing
/// required fields and invariant violations throw std::invalid_argument with
/// the field name or the violated condition in the message.
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Same, from an already-parsed JSON document.
ScenarioConfig parse_config_json(const nlohmann::json& doc);

/// Complete dump of a config with every default made explicit. Guaranteed to
/// re-parse to an identical config.
nlohmann::json effective_config(const ScenarioConfig& config);

}  // namespace trustnav
