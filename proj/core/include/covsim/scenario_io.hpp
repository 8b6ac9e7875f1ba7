#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "covsim/engine.hpp"

namespace covsim {

/// Parses a scenario file (INI-style sections; see README for the schema),
/// fills documented defaults, and validates the result. Unknown sections or
/// keys are rejected with their line number.
ScenarioConfig parse_scenario(const std::filesystem::path& path);

/// Same parser over an in-memory document; `name` is used in messages.
ScenarioConfig parse_scenario_text(std::string_view text, std::string_view name = "<memory>");

/// Serializes a fully resolved config as a scenario document. Values are
/// written with round-trip precision: parse(write_scenario(c)) == c.
std::string write_scenario(const ScenarioConfig& config);

struct CliOverrides {
    std::optional<double> dt;
    std::optional<int> resolution;
};

/// Command-line values win over scenario-file values.
ScenarioConfig apply_overrides(ScenarioConfig config, const CliOverrides& overrides);

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

}  // namespace covsim
