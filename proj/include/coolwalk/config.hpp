#pragma once

#include "coolwalk/experiments.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace coolwalk {

struct ParsedConfig {
    std::optional<std::string> subcommand;
    ExperimentConfig cfg;
};

/// YAML text to a validated config with defaults filled in. Unknown keys are
/// errors. Syntax and type errors raise ParseError with line:column; semantic
/// ones raise ValidationError naming the field.
ParsedConfig parse_config(std::string_view text);
ParsedConfig parse_config_file(const std::filesystem::path& path);

/// Canonical YAML of the effective config. parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& cfg, const std::optional<std::string>& subcommand = std::nullopt);

} // namespace coolwalk
