#include "coolwalk/app.hpp"

#include "coolwalk/config.hpp"
#include "coolwalk/error.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>

#ifndef COOLWALK_VERSION
#define COOLWALK_VERSION "0.0.0"
#endif

namespace coolwalk {

namespace {

std::string utc_timestamp(std::chrono::system_clock::time_point t)
{
    const std::time_t raw = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&raw, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
        f << content;
        if (!f.flush())
            throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"rates", "slln", "ldp", "conc", "tail", "cet", "pmf"};
    return names;
}

std::string csv_columns_help()
{
    return "Output CSVs (all begin with '# key=value' metadata lines):\n"
           "  rates  jstar.csv, J.csv, I.csv, istar.csv     x,y,is_infinite\n"
           "  slln   slln.csv                              n,replica,position,x_over_n,deviation\n"
           "         slln_summary.csv                      n,median_deviation,fraction_within\n"
           "  ldp    ldp.csv                               n,lambda,replica,cumulant,istar,deviation\n"
           "         ldp_summary.csv                       n,lambda,mean_cumulant,istar,median_deviation\n"
           "  conc   conc.csv                              statistic,n,environment,value,deviation\n"
           "         conc_summary.csv                      statistic,n,median_deviation,iqr,exceed_<eps>...\n"
           "  tail   tail.csv                              n,environment,mass\n"
           "         tail_summary.csv                      n,probability,log_n,log_probability\n"
           "  cet    cet.csv                               n,seed,total,R,B,D,deviation\n"
           "  pmf    pmf.csv                               site,mass\n"
           "A manifest.yaml with the effective config, seed and scalar results is written last.\n"
           "Exit codes: 0 ok, 1 acceptance band missed (outputs written), 2 error.\n";
}

std::string artifact_version() { return COOLWALK_VERSION; }

ExperimentResult dispatch(const std::string& subcommand, const ExperimentConfig& cfg, Exec exec)
{
    if (subcommand == "rates")
        return rates_run(cfg, exec);
    if (subcommand == "slln")
        return slln_run(cfg, exec);
    if (subcommand == "ldp")
        return ldp_cumulant_run(cfg, exec);
    if (subcommand == "conc")
        return concentration_run(cfg, exec);
    if (subcommand == "tail")
        return annealed_tail_run(cfg, exec);
    if (subcommand == "cet")
        return cet_run(cfg, exec);
    if (subcommand == "pmf")
        return pmf_run(cfg, exec);
    throw Error(ErrorCode::InvalidArgument, "unknown subcommand '" + subcommand + "'");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t from_config)
{
    if (flag)
        return *flag;
    if (const char* env = std::getenv("COOLWALK_SEED"); env && *env) {
        const std::string text(env);
        std::uint64_t value = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
            throw Error(ErrorCode::ValidationError, "COOLWALK_SEED: expected an unsigned integer, got '" + text + "'");
        return value;
    }
    return from_config;
}

int run(const CliOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        ParsedConfig parsed = options.config ? parse_config_file(*options.config) : ParsedConfig{};
        const std::string subcommand = options.subcommand ? *options.subcommand
                                       : parsed.subcommand ? *parsed.subcommand
                                                           : "";
        if (subcommand.empty())
            throw Error(ErrorCode::ValidationError, "subcommand: none given on the command line or in the config");
        ExperimentConfig& cfg = parsed.cfg;
        cfg.seed = resolve_seed(options.seed, cfg.seed);
        if (options.out)
            cfg.output = options.out->string();
        set_thread_count(options.threads);

        const auto start = std::chrono::system_clock::now();
        const auto tick = std::chrono::steady_clock::now();
        const ExperimentResult result = dispatch(subcommand, cfg);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - tick).count();
        const auto finish = std::chrono::system_clock::now();

        const std::filesystem::path dir(cfg.output);
        std::filesystem::create_directories(dir);
        std::vector<std::string> files;
        for (const NamedTable& t : result.tables) {
            Metadata meta = t.meta;
            meta.add("version", artifact_version());
            std::ostringstream body;
            t.table.write_csv(body, meta);
            const std::string name = t.name + ".csv";
            write_file_atomically(dir / name, body.str());
            files.push_back(name);
        }

        YAML::Emitter y;
        y << YAML::BeginMap;
        y << YAML::Key << "subcommand" << YAML::Value << subcommand;
        y << YAML::Key << "version" << YAML::Value << artifact_version();
        y << YAML::Key << "seed" << YAML::Value << cfg.seed;
        y << YAML::Key << "threads" << YAML::Value << max_threads();
        y << YAML::Key << "started" << YAML::Value << utc_timestamp(start);
        y << YAML::Key << "finished" << YAML::Value << utc_timestamp(finish);
        y << YAML::Key << "wall_seconds" << YAML::Value << wall;
        y << YAML::Key << "band_ok" << YAML::Value << result.band_ok;
        y << YAML::Key << "outputs" << YAML::Value << YAML::BeginSeq;
        for (const auto& f : files)
            y << f;
        y << YAML::EndSeq;
        y << YAML::Key << "summary" << YAML::Value << YAML::BeginMap;
        for (const auto& [k, v] : result.summary)
            y << YAML::Key << k << YAML::Value << v;
        y << YAML::EndMap;
        if (!result.notes.empty()) {
            y << YAML::Key << "notes" << YAML::Value << YAML::BeginSeq;
            for (const auto& n : result.notes)
                y << n;
            y << YAML::EndSeq;
        }
        y << YAML::Key << "config" << YAML::Value << YAML::Load(emit_config(cfg));
        y << YAML::EndMap;
        write_file_atomically(dir / "manifest.yaml", std::string(y.c_str()) + "\n");

        out << subcommand << ": wrote " << files.size() << " file(s) to " << dir.string() << "\n";
        for (const auto& [k, v] : result.summary)
            out << "  " << k << " = " << v << "\n";
        for (const auto& n : result.notes)
            out << "  note: " << n << "\n";
        if (!result.band_ok) {
            err << subcommand << ": acceptance band missed, outputs kept\n";
            return exit_band_failed;
        }
        return exit_ok;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
    } catch (const YAML::Exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return exit_error;
}

} // namespace coolwalk
