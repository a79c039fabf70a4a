#pragma once

#include "coolwalk/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coolwalk {

inline constexpr int exit_ok = 0;
inline constexpr int exit_band_failed = 1;
inline constexpr int exit_error = 2;

const std::vector<std::string>& subcommands();

/// Column reference for --help.
std::string csv_columns_help();

struct CliOptions {
    std::optional<std::string> subcommand;
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    int threads = 0; // 0 keeps the OpenMP default
    std::optional<std::filesystem::path> out;
};

/// Runs one module operation by subcommand name. Throws InvalidArgument for an
/// unknown name.
ExperimentResult dispatch(const std::string& subcommand, const ExperimentConfig& cfg, Exec exec = Exec::parallel);

/// Resolve config and seed, run, write CSVs and the manifest. Returns an exit
/// code; errors are reported on `err` prefixed by the error name.
int run(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Seed precedence: --seed, then COOLWALK_SEED, then the config.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t from_config);

std::string artifact_version();

} // namespace coolwalk
