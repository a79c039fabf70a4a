#pragma once

#include "coolwalk/csv.hpp"
#include "coolwalk/env.hpp"
#include "coolwalk/parallel.hpp"
#include "coolwalk/ratefn.hpp"
#include "coolwalk/walk.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coolwalk {

struct Tolerances {
    double slln_epsilon = 0.02;
    double slln_fraction = 0.9;
    double ldp_final = 0.05;
    double conc_epsilon = 0.02;
    double tail_band = 0.15;
    double cet_epsilon = 0.02;
    double cet_fraction = 0.9;

    friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

enum class ProviderKind { displacement, iid, deterministic, logmgf };

std::string_view provider_name(ProviderKind kind);

struct CetSettings {
    ProviderKind provider = ProviderKind::displacement;
    double limit = 0.0;       // iid / deterministic
    double half_width = 0.5;  // iid
    double lambda = -0.5;     // logmgf
    std::uint64_t exact_cap = 4000;
    std::uint64_t estimate_replicas = 0;

    friend bool operator==(const CetSettings&, const CetSettings&) = default;
};

struct ExperimentConfig {
    std::vector<Atom> atoms{{0.8, 0.7}, {0.3, 0.3}};
    double ellipticity = 0.2;
    /// Skip the ellipticity/nestedness validation (homogeneous sanity laws).
    bool reference = false;
    CoolingMap map = CoolingMap::polynomial(1.5);
    Frame frame = Frame::recentered;
    std::vector<std::uint64_t> n_grid{1000, 10000, 100000};
    GridSpec lambda_grid{-3.0, 3.0, 401, 40};
    GridSpec x_grid{-1.0, 1.0, 401, 0};
    std::uint64_t replicas = 50;
    std::uint64_t seed = 1;
    Tolerances tol;
    std::string output = "out";

    // rate chain
    std::uint64_t chain_n = 200'000;
    std::uint64_t warmup = 2000;
    std::uint64_t exact_cap = 20'000;

    // ldp
    std::vector<double> ldp_lambdas{-1.0, -0.25};

    // concentration; displacement n is kept small since its DP is O(n^2)
    double conc_lambda = -0.5;
    std::uint64_t conc_environments = 200;
    std::vector<double> conc_epsilons{0.01, 0.02, 0.05};
    std::vector<std::uint64_t> conc_displacement_n{500, 1000, 2000};

    // annealed tail, window given as fractions of v
    std::uint64_t tail_environments = 400;
    double tail_lo = 0.2;
    double tail_hi = 0.6;

    CetSettings cet;

    AlphaDistribution distribution() const;
    /// Throws ValidationError naming the first offending field.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct NamedTable {
    std::string name;
    Table table;
    Metadata meta;
};

struct ExperimentResult {
    std::string name;
    std::vector<NamedTable> tables;
    /// Scalar results, echoed into the run manifest.
    std::vector<std::pair<std::string, std::string>> summary;
    bool band_ok = true;
    std::vector<std::string> notes;
};

ExperimentResult slln_run(const ExperimentConfig& cfg, Exec exec = Exec::parallel);
ExperimentResult ldp_cumulant_run(const ExperimentConfig& cfg, Exec exec = Exec::parallel);
ExperimentResult concentration_run(const ExperimentConfig& cfg, Exec exec = Exec::parallel);
ExperimentResult annealed_tail_run(const ExperimentConfig& cfg, Exec exec = Exec::parallel);
ExperimentResult rates_run(const ExperimentConfig& cfg, Exec exec = Exec::parallel);
ExperimentResult cet_run(const ExperimentConfig& cfg, Exec exec = Exec::parallel);
ExperimentResult pmf_run(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

/// (1/n) Σ_k log E^{ω_k}[e^{λ Y_k}] over the pieces of `map` up to n, each
/// interval in its own environment (re-centered walk). Throws
/// IntervalTooLongForExactDP when a piece exceeds `cap`.
double rwcre_cumulant(const AlphaDistribution& dist, const CoolingMap& map, std::uint64_t n, double lambda,
                      std::uint64_t env_seed, std::uint64_t cap);

/// Mass of Z_n/n in the open interval (lo, hi).
double open_window_mass(const LatticePmf& pmf, std::uint64_t n, double lo, double hi);

/// Interquartile range by linear interpolation of order statistics.
double interquartile_range(std::vector<double> values);

} // namespace coolwalk
