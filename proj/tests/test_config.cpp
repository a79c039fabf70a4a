#include <doctest.h>

#include "coolwalk/config.hpp"
#include "coolwalk/error.hpp"

#include <string>

using namespace coolwalk;

namespace {

ErrorCode code_of(const std::string& text)
{
    try {
        (void)parse_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error for: " << text);
    return ErrorCode::InvalidArgument;
}

std::string message_of(const std::string& text)
{
    try {
        (void)parse_config(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("empty config gives the defaults")
{
    const auto parsed = parse_config("{}");
    CHECK_FALSE(parsed.subcommand);
    CHECK(parsed.cfg == ExperimentConfig{});
}

TEST_CASE("minimal config fills defaults")
{
    const auto parsed = parse_config("subcommand: slln\nseed: 42\nn_grid: [10, 20]\n");
    REQUIRE(parsed.subcommand);
    CHECK(*parsed.subcommand == "slln");
    CHECK(parsed.cfg.seed == 42);
    CHECK(parsed.cfg.n_grid == std::vector<std::uint64_t>{10, 20});
    CHECK(parsed.cfg.replicas == ExperimentConfig{}.replicas);
    CHECK(parsed.cfg.tol == Tolerances{});
}

TEST_CASE("weights not summing to one")
{
    const std::string text = "dist:\n  atoms: [[0.8, 0.69], [0.3, 0.3]]\n";
    CHECK(code_of(text) == ErrorCode::ValidationError);
    const auto msg = message_of(text);
    CHECK(msg.find("dist") != std::string::npos);
    CHECK(msg.find("WeightSum") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with a position")
{
    CHECK(code_of("seed: 1\nreplicaz: 3\n") == ErrorCode::ValidationError);
    const auto msg = message_of("seed: 1\nreplicaz: 3\n");
    CHECK(msg.find("replicaz") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);

    CHECK(message_of("tail:\n  environments: 3\n  colour: red\n").find("tail.colour") != std::string::npos);
}

TEST_CASE("type and syntax errors carry line and column")
{
    CHECK(code_of("seed: -4\n") == ErrorCode::ParseError);
    CHECK(code_of("seed: 1.5\n") == ErrorCode::ParseError);
    CHECK(code_of("replicas: many\n") == ErrorCode::ParseError);
    CHECK(code_of("n_grid: 5\n") == ErrorCode::ParseError);
    const auto msg = message_of("seed: 1\nchain:\n  n: [1\n");
    CHECK(msg.find("ParseError") != std::string::npos);
    CHECK(msg.find("line") != std::string::npos);

    const auto typed = message_of("seed: 1\nconc:\n  lambda: abc\n");
    CHECK(typed.find("line 3, column 11") != std::string::npos);
    CHECK(typed.find("conc.lambda") != std::string::npos);
}

TEST_CASE("semantic errors name the field")
{
    CHECK(message_of("n_grid: [100, 10]\n").find("n_grid") != std::string::npos);
    CHECK(message_of("replicas: 0\n").find("replicas") != std::string::npos);
    CHECK(message_of("map:\n  kind: spiral\n").find("map") != std::string::npos);
    CHECK(message_of("frame: sideways\n").find("frame") != std::string::npos);
    CHECK(message_of("cet:\n  provider: magic\n").find("cet.provider") != std::string::npos);
}

TEST_CASE("emit then parse round-trips")
{
    ExperimentConfig c;
    c.atoms = {{0.8, 0.9}, {0.4, 0.1}};
    c.map = CoolingMap::explicit_increments({3, 1, 4, 1, 5});
    c.frame = Frame::absolute;
    c.n_grid = {7, 70, 700};
    c.lambda_grid = {-2.5, 1.25, 33, 5};
    c.replicas = 9;
    c.seed = 18446744073709551615ull;
    c.output = "some dir/with: colon";
    c.ldp_lambdas = {-0.1, -0.7};
    c.conc_epsilons = {0.003};
    c.tail_lo = 0.1;
    c.tail_hi = 0.3;
    c.cet.provider = ProviderKind::iid;
    c.cet.limit = 0.1 + 0.2;
    c.tol.cet_fraction = 0.85;
    for (const auto& map : {CoolingMap::polynomial(1.5), CoolingMap::exponential(0.4), CoolingMap::constant(12),
                            CoolingMap::explicit_increments({2, 2})}) {
        c.map = map;
        const auto text = emit_config(c, "cet");
        const auto back = parse_config(text);
        CAPTURE(text);
        CHECK(back.cfg == c);
        REQUIRE(back.subcommand);
        CHECK(*back.subcommand == "cet");
        CHECK(emit_config(back.cfg, "cet") == text);
    }
}

TEST_CASE("reference flag skips law validation")
{
    const auto parsed = parse_config("dist:\n  atoms: [[0.75, 1.0]]\n  reference: true\n");
    CHECK(parsed.cfg.reference);
    CHECK(code_of("dist:\n  atoms: [[0.75, 1.0]]\n") == ErrorCode::ValidationError);
}
