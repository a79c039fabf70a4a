#include "coolwalk/config.hpp"

#include "coolwalk/error.hpp"
#include "coolwalk/format.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace coolwalk {

namespace {

std::string where(const YAML::Node& node)
{
    const YAML::Mark m = node.Mark();
    if (m.is_null())
        return "";
    return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ": ";
}

[[noreturn]] void parse_error(const YAML::Node& node, const std::string& field, const std::string& what)
{
    throw Error(ErrorCode::ParseError, where(node) + field + ": " + what);
}

[[noreturn]] void validation_error(const YAML::Node& node, const std::string& field, const std::string& what)
{
    throw Error(ErrorCode::ValidationError, where(node) + field + ": " + what);
}

void require_map(const YAML::Node& node, const std::string& field,
                 std::initializer_list<std::string_view> allowed)
{
    if (!node.IsMap())
        parse_error(node, field, "expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            validation_error(kv.first, field.empty() ? key : field + "." + key, "unknown key");
    }
}

std::string scalar(const YAML::Node& node, const std::string& field)
{
    if (!node.IsScalar())
        parse_error(node, field, "expected a scalar");
    return node.Scalar();
}

double to_double(const YAML::Node& node, const std::string& field)
{
    const std::string text = scalar(node, field);
    try {
        return node.as<double>();
    } catch (const YAML::Exception&) {
        parse_error(node, field, "expected a number, got '" + text + "'");
    }
}

std::uint64_t to_u64(const YAML::Node& node, const std::string& field)
{
    const std::string text = scalar(node, field);
    std::uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        parse_error(node, field, "expected a non-negative integer, got '" + text + "'");
    return value;
}

bool to_bool(const YAML::Node& node, const std::string& field)
{
    const std::string text = scalar(node, field);
    try {
        return node.as<bool>();
    } catch (const YAML::Exception&) {
        parse_error(node, field, "expected true or false, got '" + text + "'");
    }
}

template <class Fn>
auto to_list(const YAML::Node& node, const std::string& field, Fn&& item)
{
    if (!node.IsSequence())
        parse_error(node, field, "expected a list");
    std::vector<decltype(item(node, field))> out;
    for (std::size_t i = 0; i < node.size(); ++i)
        out.push_back(item(node[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

GridSpec to_grid(const YAML::Node& node, const std::string& field, GridSpec grid)
{
    require_map(node, field, {"lo", "hi", "points", "refine_near_zero"});
    if (node["lo"])
        grid.lo = to_double(node["lo"], field + ".lo");
    if (node["hi"])
        grid.hi = to_double(node["hi"], field + ".hi");
    if (node["points"])
        grid.points = to_u64(node["points"], field + ".points");
    if (node["refine_near_zero"])
        grid.refine_near_zero = to_u64(node["refine_near_zero"], field + ".refine_near_zero");
    return grid;
}

CoolingMap to_map(const YAML::Node& node)
{
    require_map(node, "map", {"kind", "parameter", "increments"});
    if (!node["kind"])
        validation_error(node, "map.kind", "missing");
    const std::string kind = scalar(node["kind"], "map.kind");
    const auto need = [&](const char* key) {
        if (!node[key])
            validation_error(node, std::string("map.") + key, "required for kind " + kind);
        return node[key];
    };
    const auto refuse = [&](const char* key) {
        if (node[key])
            validation_error(node[key], std::string("map.") + key, "not used by kind " + kind);
    };
    try {
        if (kind == "polynomial" || kind == "exponential") {
            refuse("increments");
            const double p = to_double(need("parameter"), "map.parameter");
            return kind == "polynomial" ? CoolingMap::polynomial(p) : CoolingMap::exponential(p);
        }
        if (kind == "constant") {
            refuse("increments");
            return CoolingMap::constant(to_u64(need("parameter"), "map.parameter"));
        }
        if (kind == "explicit") {
            refuse("parameter");
            return CoolingMap::explicit_increments(to_list(need("increments"), "map.increments", to_u64));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidArgument)
            validation_error(node, "map", e.what());
        throw;
    }
    validation_error(node["kind"], "map.kind", "unknown kind '" + kind + "' (polynomial, exponential, constant, explicit)");
}

ProviderKind to_provider(const YAML::Node& node)
{
    const std::string text = scalar(node, "cet.provider");
    for (ProviderKind k : {ProviderKind::displacement, ProviderKind::iid, ProviderKind::deterministic, ProviderKind::logmgf})
        if (text == provider_name(k))
            return k;
    validation_error(node, "cet.provider", "unknown provider '" + text + "' (displacement, iid, deterministic, logmgf)");
}

ParsedConfig from_yaml(const YAML::Node& root)
{
    ParsedConfig out;
    ExperimentConfig& c = out.cfg;
    if (root.IsNull())
        return out;
    require_map(root, "", {"subcommand", "seed", "output", "dist", "map", "frame", "n_grid", "replicas",
                           "lambda_grid", "x_grid", "chain", "exact_cap", "ldp", "conc", "tail", "cet",
                           "tolerances"});
    if (root["subcommand"])
        out.subcommand = scalar(root["subcommand"], "subcommand");
    if (root["seed"])
        c.seed = to_u64(root["seed"], "seed");
    if (root["output"])
        c.output = scalar(root["output"], "output");
    if (const auto d = root["dist"]) {
        require_map(d, "dist", {"atoms", "c", "reference"});
        if (d["atoms"]) {
            c.atoms = to_list(d["atoms"], "dist.atoms", [](const YAML::Node& a, const std::string& f) {
                if (!a.IsSequence() || a.size() != 2)
                    parse_error(a, f, "expected [p, weight]");
                return Atom{to_double(a[0], f + ".p"), to_double(a[1], f + ".weight")};
            });
        }
        if (d["c"])
            c.ellipticity = to_double(d["c"], "dist.c");
        if (d["reference"])
            c.reference = to_bool(d["reference"], "dist.reference");
    }
    if (root["map"])
        c.map = to_map(root["map"]);
    if (const auto f = root["frame"]) {
        const std::string text = scalar(f, "frame");
        if (text == "recentered")
            c.frame = Frame::recentered;
        else if (text == "absolute")
            c.frame = Frame::absolute;
        else
            validation_error(f, "frame", "unknown frame '" + text + "' (recentered, absolute)");
    }
    if (root["n_grid"])
        c.n_grid = to_list(root["n_grid"], "n_grid", to_u64);
    if (root["replicas"])
        c.replicas = to_u64(root["replicas"], "replicas");
    if (root["lambda_grid"])
        c.lambda_grid = to_grid(root["lambda_grid"], "lambda_grid", c.lambda_grid);
    if (root["x_grid"])
        c.x_grid = to_grid(root["x_grid"], "x_grid", c.x_grid);
    if (const auto ch = root["chain"]) {
        require_map(ch, "chain", {"n", "warmup"});
        if (ch["n"])
            c.chain_n = to_u64(ch["n"], "chain.n");
        if (ch["warmup"])
            c.warmup = to_u64(ch["warmup"], "chain.warmup");
    }
    if (root["exact_cap"])
        c.exact_cap = to_u64(root["exact_cap"], "exact_cap");
    if (const auto l = root["ldp"]) {
        require_map(l, "ldp", {"lambdas"});
        if (l["lambdas"])
            c.ldp_lambdas = to_list(l["lambdas"], "ldp.lambdas", to_double);
    }
    if (const auto k = root["conc"]) {
        require_map(k, "conc", {"lambda", "environments", "epsilons", "displacement_n_grid"});
        if (k["lambda"])
            c.conc_lambda = to_double(k["lambda"], "conc.lambda");
        if (k["environments"])
            c.conc_environments = to_u64(k["environments"], "conc.environments");
        if (k["epsilons"])
            c.conc_epsilons = to_list(k["epsilons"], "conc.epsilons", to_double);
        if (k["displacement_n_grid"])
            c.conc_displacement_n = to_list(k["displacement_n_grid"], "conc.displacement_n_grid", to_u64);
    }
    if (const auto t = root["tail"]) {
        require_map(t, "tail", {"environments", "window"});
        if (t["environments"])
            c.tail_environments = to_u64(t["environments"], "tail.environments");
        if (const auto w = t["window"]) {
            const auto pair = to_list(w, "tail.window", to_double);
            if (pair.size() != 2)
                parse_error(w, "tail.window", "expected [lo, hi]");
            c.tail_lo = pair[0];
            c.tail_hi = pair[1];
        }
    }
    if (const auto e = root["cet"]) {
        require_map(e, "cet", {"provider", "limit", "half_width", "lambda", "exact_cap", "estimate_replicas"});
        if (e["provider"])
            c.cet.provider = to_provider(e["provider"]);
        if (e["limit"])
            c.cet.limit = to_double(e["limit"], "cet.limit");
        if (e["half_width"])
            c.cet.half_width = to_double(e["half_width"], "cet.half_width");
        if (e["lambda"])
            c.cet.lambda = to_double(e["lambda"], "cet.lambda");
        if (e["exact_cap"])
            c.cet.exact_cap = to_u64(e["exact_cap"], "cet.exact_cap");
        if (e["estimate_replicas"])
            c.cet.estimate_replicas = to_u64(e["estimate_replicas"], "cet.estimate_replicas");
    }
    if (const auto t = root["tolerances"]) {
        require_map(t, "tolerances", {"slln_epsilon", "slln_fraction", "ldp_final", "conc_epsilon", "tail_band",
                                      "cet_epsilon", "cet_fraction"});
        const auto set = [&](const char* key, double& slot) {
            if (t[key])
                slot = to_double(t[key], std::string("tolerances.") + key);
        };
        set("slln_epsilon", c.tol.slln_epsilon);
        set("slln_fraction", c.tol.slln_fraction);
        set("ldp_final", c.tol.ldp_final);
        set("conc_epsilon", c.tol.conc_epsilon);
        set("tail_band", c.tol.tail_band);
        set("cet_epsilon", c.tol.cet_epsilon);
        set("cet_fraction", c.tol.cet_fraction);
    }
    c.validate();
    return out;
}

// Numbers go out in shortest round-trip form so that re-parsing is exact.
template <class T>
void emit_list(YAML::Emitter& y, const std::vector<T>& values)
{
    y << YAML::Flow << YAML::BeginSeq;
    for (const T& v : values) {
        if constexpr (std::is_floating_point_v<T>)
            y << format_double(v);
        else
            y << v;
    }
    y << YAML::EndSeq;
}

void emit_grid(YAML::Emitter& y, const GridSpec& g)
{
    y << YAML::BeginMap;
    y << YAML::Key << "lo" << YAML::Value << format_double(g.lo);
    y << YAML::Key << "hi" << YAML::Value << format_double(g.hi);
    y << YAML::Key << "points" << YAML::Value << g.points;
    y << YAML::Key << "refine_near_zero" << YAML::Value << g.refine_near_zero;
    y << YAML::EndMap;
}

} // namespace

ParsedConfig parse_config(std::string_view text)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(e.mark.line + 1) + ", column " +
                                               std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    return from_yaml(root);
}

ParsedConfig parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string emit_config(const ExperimentConfig& c, const std::optional<std::string>& subcommand)
{
    YAML::Emitter y;
    y << YAML::BeginMap;
    if (subcommand)
        y << YAML::Key << "subcommand" << YAML::Value << *subcommand;
    y << YAML::Key << "seed" << YAML::Value << c.seed;
    y << YAML::Key << "output" << YAML::Value << YAML::DoubleQuoted << c.output;

    y << YAML::Key << "dist" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "atoms" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const Atom& a : c.atoms)
        y << YAML::Flow << YAML::BeginSeq << format_double(a.p) << format_double(a.weight) << YAML::EndSeq;
    y << YAML::EndSeq;
    y << YAML::Key << "c" << YAML::Value << format_double(c.ellipticity);
    y << YAML::Key << "reference" << YAML::Value << c.reference;
    y << YAML::EndMap;

    y << YAML::Key << "map" << YAML::Value << YAML::BeginMap;
    switch (c.map.kind()) {
    case CoolingMap::Kind::polynomial:
    case CoolingMap::Kind::exponential:
        y << YAML::Key << "kind" << YAML::Value << std::string(kind_name(c.map.kind()));
        y << YAML::Key << "parameter" << YAML::Value << format_double(c.map.parameter());
        break;
    case CoolingMap::Kind::constant:
        y << YAML::Key << "kind" << YAML::Value << "constant";
        y << YAML::Key << "parameter" << YAML::Value << c.map.increment(1);
        break;
    case CoolingMap::Kind::explicit_list:
        y << YAML::Key << "kind" << YAML::Value << "explicit";
        y << YAML::Key << "increments" << YAML::Value;
        emit_list(y, c.map.listed());
        break;
    }
    y << YAML::EndMap;

    y << YAML::Key << "frame" << YAML::Value << std::string(frame_name(c.frame));
    y << YAML::Key << "n_grid" << YAML::Value;
    emit_list(y, c.n_grid);
    y << YAML::Key << "replicas" << YAML::Value << c.replicas;
    y << YAML::Key << "lambda_grid" << YAML::Value;
    emit_grid(y, c.lambda_grid);
    y << YAML::Key << "x_grid" << YAML::Value;
    emit_grid(y, c.x_grid);
    y << YAML::Key << "chain" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "n" << YAML::Value << c.chain_n;
    y << YAML::Key << "warmup" << YAML::Value << c.warmup;
    y << YAML::EndMap;
    y << YAML::Key << "exact_cap" << YAML::Value << c.exact_cap;

    y << YAML::Key << "ldp" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "lambdas" << YAML::Value;
    emit_list(y, c.ldp_lambdas);
    y << YAML::EndMap;

    y << YAML::Key << "conc" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "lambda" << YAML::Value << format_double(c.conc_lambda);
    y << YAML::Key << "environments" << YAML::Value << c.conc_environments;
    y << YAML::Key << "epsilons" << YAML::Value;
    emit_list(y, c.conc_epsilons);
    y << YAML::Key << "displacement_n_grid" << YAML::Value;
    emit_list(y, c.conc_displacement_n);
    y << YAML::EndMap;

    y << YAML::Key << "tail" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "environments" << YAML::Value << c.tail_environments;
    y << YAML::Key << "window" << YAML::Value;
    emit_list(y, std::vector<double>{c.tail_lo, c.tail_hi});
    y << YAML::EndMap;

    y << YAML::Key << "cet" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "provider" << YAML::Value << std::string(provider_name(c.cet.provider));
    y << YAML::Key << "limit" << YAML::Value << format_double(c.cet.limit);
    y << YAML::Key << "half_width" << YAML::Value << format_double(c.cet.half_width);
    y << YAML::Key << "lambda" << YAML::Value << format_double(c.cet.lambda);
    y << YAML::Key << "exact_cap" << YAML::Value << c.cet.exact_cap;
    y << YAML::Key << "estimate_replicas" << YAML::Value << c.cet.estimate_replicas;
    y << YAML::EndMap;

    y << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "slln_epsilon" << YAML::Value << format_double(c.tol.slln_epsilon);
    y << YAML::Key << "slln_fraction" << YAML::Value << format_double(c.tol.slln_fraction);
    y << YAML::Key << "ldp_final" << YAML::Value << format_double(c.tol.ldp_final);
    y << YAML::Key << "conc_epsilon" << YAML::Value << format_double(c.tol.conc_epsilon);
    y << YAML::Key << "tail_band" << YAML::Value << format_double(c.tol.tail_band);
    y << YAML::Key << "cet_epsilon" << YAML::Value << format_double(c.tol.cet_epsilon);
    y << YAML::Key << "cet_fraction" << YAML::Value << format_double(c.tol.cet_fraction);
    y << YAML::EndMap;

    y << YAML::EndMap;
    return std::string(y.c_str()) + "\n";
}

} // namespace coolwalk
