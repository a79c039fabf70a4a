#include <doctest.h>

#include "coolwalk/cet.hpp"
#include "coolwalk/error.hpp"
#include "coolwalk/walk.hpp"

#include <cmath>
#include <sstream>

using namespace coolwalk;

namespace {

AlphaDistribution reference_dist() { return validate_alpha({{0.8, 0.7}, {0.3, 0.3}}, 0.2); }

// positive speed with light tails (s ≈ 5.7), v = 5/11
AlphaDistribution light_dist() { return validate_alpha({{0.8, 0.9}, {0.4, 0.1}}, 0.2); }

std::vector<CoolingMap> maps()
{
    return {CoolingMap::polynomial(1.5), CoolingMap::polynomial(0.7), CoolingMap::exponential(0.4),
            CoolingMap::explicit_increments({3, 1, 4, 1, 5}), CoolingMap::constant(10)};
}

} // namespace

TEST_CASE("cooling weights sum to one")
{
    for (const auto& map : maps()) {
        CAPTURE(map.describe());
        for (std::uint64_t n : {1ULL, 2ULL, 7ULL, 100ULL, 12345ULL, 1000000ULL}) {
            const auto w = cooling_weights(map, n);
            std::uint64_t whole = w.bar_t;
            double sum = w.gamma_bar;
            for (std::size_t i = 0; i < w.lengths.size(); ++i) {
                whole += w.lengths[i];
                sum += w.gamma[i];
            }
            CHECK(whole == n);
            CHECK(std::abs(sum - 1.0) <= 1e-15 * static_cast<double>(w.lengths.size() + 1));
        }
    }
    CHECK_THROWS_AS(cooling_weights(CoolingMap::polynomial(1.0), 0), Error);
}

TEST_CASE("weight of a fixed interval vanishes")
{
    const auto map = CoolingMap::polynomial(1.5);
    double previous = 1.0;
    for (std::uint64_t n : {10ULL, 100ULL, 1000ULL, 10000ULL, 100000ULL}) {
        const auto w = cooling_weights(map, n);
        const double g = w.gamma.empty() ? w.gamma_bar : w.gamma[0];
        CHECK(g < previous);
        previous = g;
    }
    CHECK(previous < 1e-4);
}

TEST_CASE("deterministic provider returns L")
{
    const DeterministicProvider exact(0.375);
    const DeterministicProvider third(1.0 / 3.0);
    for (const auto& map : maps()) {
        for (std::uint64_t n : {1ULL, 5ULL, 99ULL, 4096ULL, 77777ULL}) {
            CHECK(cooling_sum(exact, map, n, 1) == 0.375);
            CHECK(std::abs(cooling_sum(third, map, n, 1) - 1.0 / 3.0) <= 1e-16);
            const auto row = rbd_decompose(third, map, n, 1.0 / 3.0, 1);
            CHECK(row.R == 0.0);
            CHECK(row.B == 0.0);
            CHECK(std::abs(row.D) <= 1e-16);
            CHECK(row.means_exact);
        }
    }
    CHECK_THROWS_AS(cooling_sum(exact, CoolingMap::polynomial(1.0), 0, 1), Error);
}

TEST_CASE("deterministic D is the Toeplitz average")
{
    const double L = 0.25;
    const DeterministicProvider harmonic([L](std::uint64_t k) { return L + 1.0 / static_cast<double>(k); },
                                         L + 1.0, "harmonic");
    const auto map = CoolingMap::polynomial(1.0);
    std::vector<double> ds;
    for (std::uint64_t n : {100ULL, 1000ULL, 10000ULL, 100000ULL, 1000000ULL}) {
        const auto row = rbd_decompose(harmonic, map, n, L, 3);
        const auto w = cooling_weights(map, n);
        double toeplitz = 0.0;
        for (std::size_t i = 0; i < w.lengths.size(); ++i)
            toeplitz += w.gamma[i] / static_cast<double>(i + 1);
        if (w.bar_t > 0)
            toeplitz += w.gamma_bar / static_cast<double>(w.lengths.size() + 1);
        CHECK(row.D == doctest::Approx(toeplitz).epsilon(1e-12));
        CHECK(row.R == 0.0);
        CHECK(row.B == 0.0);
        CHECK(std::abs(row.total - L - (row.R + row.B + row.D)) <= 1e-12);
        ds.push_back(row.D);
    }
    CHECK(count_inversions(ds) == 0);
    CHECK(ds.back() < 0.01);
}

TEST_CASE("exact-means identity total - L = R + B + D")
{
    const IidProvider iid(0.3, 0.5);
    const DisplacementProvider walk(reference_dist(), 5000);
    for (const auto& map : {CoolingMap::polynomial(1.5), CoolingMap::explicit_increments({7, 2, 30})}) {
        for (std::uint64_t n : {1ULL, 50ULL, 777ULL, 3000ULL}) {
            for (std::uint64_t seed : {1ULL, 2ULL}) {
                const auto a = rbd_decompose(iid, map, n, 0.3, seed);
                CHECK(a.means_exact);
                CHECK(std::abs(a.total - 0.3 - (a.R + a.B + a.D)) <= 1e-12);
                CHECK(a.D == 0.0);
                const double v = 1.0 / 15.0;
                const auto b = rbd_decompose(walk, map, n, v, seed);
                CHECK(b.means_exact);
                CHECK(std::abs(b.total - v - (b.R + b.B + b.D)) <= 1e-12);
                CHECK(b.total == cooling_sum(walk, map, n, seed));
            }
        }
    }
}

TEST_CASE("displacement provider reproduces the RWCRE walk")
{
    const auto dist = reference_dist();
    const DisplacementProvider provider(dist);
    for (const auto& map : maps()) {
        for (std::uint64_t n : {1ULL, 17ULL, 500ULL, 20000ULL}) {
            const auto path = rwcre_sample(dist, map, n, 42, 42);
            CHECK(cooling_sum(provider, map, n, 42) ==
                  doctest::Approx(static_cast<double>(path.endpoint()) / static_cast<double>(n)).epsilon(1e-15));
        }
    }
}

TEST_CASE("iid provider averages to L")
{
    const double L = 0.3, h = 0.5;
    const IidProvider provider(L, h);
    const auto map = CoolingMap::polynomial(1.5);
    const std::uint64_t n = 100'000;
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        sum += cooling_sum(provider, map, n, seed);
    const double mean = sum / 100.0;
    // sd of one total is h/sqrt(3n)
    const double se = h / std::sqrt(3.0 * static_cast<double>(n)) / 10.0;
    CHECK(std::abs(mean - L) < 4.0 * se);

    CHECK(max_observed_increment(provider, 50, 1000, 7, 200) <= provider.increment_bound());
    const DisplacementProvider walk(reference_dist());
    CHECK(max_observed_increment(walk, 50, 1000, 7, 200) == 1.0);
}

TEST_CASE("refreshed and boundary terms shrink for bounded iid arrays")
{
    const IidProvider provider(0.0, 1.0);
    const auto map = CoolingMap::polynomial(1.5);
    std::vector<double> max_r, max_b;
    for (std::uint64_t n : {1000ULL, 10000ULL, 100000ULL}) {
        double r = 0.0, b = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto row = rbd_decompose(provider, map, n, 0.0, seed);
            r = std::max(r, std::abs(row.R));
            b = std::max(b, std::abs(row.B));
        }
        max_r.push_back(r);
        max_b.push_back(b);
    }
    CHECK(count_inversions(max_r) <= 1);
    CHECK(count_inversions(max_b) <= 1);
    CHECK(max_r.back() < max_r.front());
}

TEST_CASE("missing means")
{
    const DisplacementProvider capped(reference_dist(), 10, 0);
    const auto map = CoolingMap::constant(50);
    try {
        (void)rbd_decompose(capped, map, 200, 0.0, 1);
        FAIL("expected MeansUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MeansUnavailable);
    }
    const std::vector<std::uint64_t> grid{100, 200};
    const std::vector<std::uint64_t> seeds{1, 2};
    const auto report = convergence_report(capped, map, grid, seeds, 1.0 / 15.0);
    CHECK_FALSE(report.means_available);
    CHECK(std::isnan(report.rows[0].R));
    CHECK(report.no_cooling);

    const DisplacementProvider estimated(reference_dist(), 10, 8);
    const auto row = rbd_decompose(estimated, map, 200, 1.0 / 15.0, 1);
    CHECK_FALSE(row.means_exact);
    CHECK(std::abs(row.total - 1.0 / 15.0 - (row.R + row.B + row.D)) <= 1e-12);
}

TEST_CASE("convergence report")
{
    const std::vector<std::uint64_t> grid{100, 1000, 10000};
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    const auto flat = convergence_report(DeterministicProvider(0.5), CoolingMap::polynomial(2.0), grid, seeds, 0.5);
    for (const auto& row : flat.rows)
        CHECK(row.deviation == 0.0);
    CHECK(flat.means_exact);
    CHECK(flat.limit_estimate == 0.5);

    const DisplacementProvider walk(light_dist(), 2000);
    const auto serial = convergence_report(walk, CoolingMap::polynomial(1.5), grid, seeds, 5.0 / 11.0);
    const auto parallel =
        convergence_report(walk, CoolingMap::polynomial(1.5), grid, seeds, 5.0 / 11.0, Exec::parallel);
    std::ostringstream a, b;
    serial.write_csv(a, {});
    parallel.write_csv(b, {});
    CHECK(a.str() == b.str());
    CHECK(a.str().find("n,seed,total,R,B,D,deviation\n") != std::string::npos);
    CHECK(serial.rows.size() == 9);

    const std::vector<std::uint64_t> bad{10, 10};
    CHECK_THROWS_AS(convergence_report(walk, CoolingMap::polynomial(1.5), bad, seeds, 0.0), Error);
}

TEST_CASE("RWRE displacement array converges to the speed")
{
    const auto dist = light_dist();
    const double v = speed(dist).value;
    CHECK(v == doctest::Approx(5.0 / 11.0));
    const DisplacementProvider provider(dist);
    int within = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        within += std::abs(cooling_sum(provider, CoolingMap::polynomial(1.5), 100'000, seed) - v) < 0.02 ? 1 : 0;
    CHECK(within >= 18);
}

TEST_CASE("trend helpers")
{
    CHECK(count_inversions(std::vector<double>{3, 2, 2, 1}) == 0);
    CHECK(count_inversions(std::vector<double>{3, 4, 2, 3}) == 2);
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(fit_slope(std::vector<double>{0, 1, 2}, std::vector<double>{1, 3, 5}) == doctest::Approx(2.0));
}
