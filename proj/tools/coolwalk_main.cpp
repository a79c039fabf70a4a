#include "coolwalk/app.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace coolwalk;

    CLI::App app{"Random walks in static and cooling random environments: exact laws, rate functions and "
                 "desk-scale experiments."};
    app.footer(csv_columns_help());

    CliOptions options;
    std::string subcommand;
    std::string config, out;
    std::uint64_t seed = 0;

    app.add_option("subcommand", subcommand, "rates | slln | ldp | conc | tail | cet | pmf (or set in the config)")
        ->check(CLI::IsMember(subcommands()));
    app.add_option("--config", config, "YAML config file")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides COOLWALK_SEED and the config)");
    app.add_option("--threads", options.threads, "OpenMP threads; outputs do not depend on it")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", out, "output directory (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    if (!subcommand.empty())
        options.subcommand = subcommand;
    if (!config.empty())
        options.config = config;
    if (*seed_opt)
        options.seed = seed;
    if (!out.empty())
        options.out = out;
    return run(options, std::cout, std::cerr);
}
