#pragma once

// Triangular-array averages along a cooling map:
//   S_n = (1/n) (Σ_{k<ℓ} ψ^{(k)}_{T_k} + ψ^{(ℓ)}_{T̄ⁿ})
// and the split S_n − L = R_n + B_n + D_n into refreshed, boundary and
// deterministic parts.

#include "coolwalk/csv.hpp"
#include "coolwalk/env.hpp"
#include "coolwalk/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coolwalk {

struct MeanValue {
    double value; // E[ψ_n^{(k)}] / n
    bool exact;
};

/// Supplier of the array ψ_n^{(k)}. Implementations must be pure functions of
/// (k, n, seed) and use independent streams for distinct k.
class ArrayProvider {
public:
    virtual ~ArrayProvider() = default;

    virtual double value(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const = 0;
    /// C with |ψ_{n+1} − ψ_n| ≤ C.
    virtual double increment_bound() const = 0;
    /// Mean per step, exact or estimated; nullopt when neither is available.
    virtual std::optional<MeanValue> mean(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const = 0;
    virtual std::string describe() const = 0;
};

/// ψ_n^{(k)} = n L_k.
class DeterministicProvider final : public ArrayProvider {
public:
    explicit DeterministicProvider(double limit);
    DeterministicProvider(std::function<double(std::uint64_t)> limits, double bound, std::string label);

    double value(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const override;
    double increment_bound() const override { return bound_; }
    std::optional<MeanValue> mean(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const override;
    std::string describe() const override { return label_; }

private:
    std::function<double(std::uint64_t)> limits_;
    double bound_;
    std::string label_;
};

/// ψ_n^{(k)} = Σ_{i<n} U_i with U_i uniform on [L − h, L + h], counter based
/// so that prefixes agree.
class IidProvider final : public ArrayProvider {
public:
    IidProvider(double limit, double half_width);

    double value(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const override;
    double increment_bound() const override { return std::abs(limit_) + half_width_; }
    std::optional<MeanValue> mean(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const override;
    std::string describe() const override;

private:
    double limit_;
    double half_width_;
};

/// ψ_n^{(k)} = Z_n of an RWRE in ω_k = interval_environment(dist, seed, k)
/// with walk stream interval_walk_seed(seed, k). Means are quenched (given
/// ω_k): exact through evolve_pmf up to exact_cap steps, else the average of
/// `replicas` extra walks in the same environment.
class DisplacementProvider final : public ArrayProvider {
public:
    DisplacementProvider(AlphaDistribution dist, std::uint64_t exact_cap = 4000, std::uint64_t replicas = 0);

    double value(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const override;
    double increment_bound() const override { return 1.0; }
    std::optional<MeanValue> mean(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const override;
    std::string describe() const override;

private:
    AlphaDistribution dist_;
    std::uint64_t exact_cap_;
    std::uint64_t replicas_;
};

/// ψ_n^{(k)} = log E^{ω_k}[e^{λ Z_n}]. Given ω_k there is nothing left to
/// average, so the mean is estimated over `replicas` fresh environments.
class LogMgfProvider final : public ArrayProvider {
public:
    LogMgfProvider(AlphaDistribution dist, double lambda, std::uint64_t replicas = 16);

    double value(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const override;
    double increment_bound() const override { return std::abs(lambda_); }
    std::optional<MeanValue> mean(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const override;
    std::string describe() const override;

private:
    AlphaDistribution dist_;
    double lambda_;
    std::uint64_t replicas_;
};

struct CoolingWeights {
    std::vector<std::uint64_t> lengths; // T_1 .. T_{ℓ−1}
    std::uint64_t bar_t = 0;
    std::uint64_t n = 0;
    std::vector<double> gamma; // T_k / n
    double gamma_bar = 0.0;    // T̄ⁿ / n
};

CoolingWeights cooling_weights(const CoolingMap& map, std::uint64_t n);

/// S_n. Requires n ≥ 1.
double cooling_sum(const ArrayProvider& provider, const CoolingMap& map, std::uint64_t n,
                   std::uint64_t seed);

struct RbdRow {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    double total = 0.0;
    double R = 0.0;
    double B = 0.0;
    double D = 0.0;
    double deviation = 0.0; // |total − L|
    bool means_exact = false;
    std::vector<double> centered; // 𝒞_k, k < ℓ
    double centered_bar = 0.0;    // 𝒞̄ⁿ, 0 when T̄ⁿ = 0
    std::vector<double> means;    // L_k
    double mean_bar = 0.0;
};

/// Throws MeansUnavailable when the provider has no mean for some piece.
RbdRow rbd_decompose(const ArrayProvider& provider, const CoolingMap& map, std::uint64_t n, double L,
                     std::uint64_t seed);

/// Spot check of the increment bound at `samples` random (k, n) with n < n_max.
/// Returns the largest |ψ_{n+1} − ψ_n| seen.
double max_observed_increment(const ArrayProvider& provider, std::uint64_t k_max, std::uint64_t n_max,
                              std::uint64_t seed, std::size_t samples);

struct CETReport {
    std::string provider;
    std::string map;
    double L = 0.0;
    std::vector<std::uint64_t> n_grid;
    std::vector<std::uint64_t> seeds;
    std::vector<RbdRow> rows;           // n-major, seeds in the given order
    std::vector<double> median_deviation; // per n
    std::size_t inversions = 0;
    bool trend_ok = true;  // at most one inversion of the medians
    double limit_estimate = 0.0; // mean total at the largest n
    double decay_exponent = 0.0; // slope of log median deviation against log n
    bool means_available = true;
    bool means_exact = true;
    bool no_cooling = false;

    void write_csv(std::ostream& out, const Metadata& meta) const;
};

CETReport convergence_report(const ArrayProvider& provider, const CoolingMap& map,
                             std::span<const std::uint64_t> n_grid, std::span<const std::uint64_t> seeds,
                             double L, Exec exec = Exec::serial);

/// Adjacent pairs where the sequence goes up.
std::size_t count_inversions(std::span<const double> values);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);

} // namespace coolwalk
