#pragma once

#include "coolwalk/csv.hpp"
#include "coolwalk/env.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace coolwalk {

/// Probability mass function on the integer window [offset, offset + size).
struct LatticePmf {
    std::int64_t offset = 0;
    std::vector<double> weights;

    std::int64_t lo() const noexcept { return offset; }
    std::int64_t hi() const noexcept { return offset + static_cast<std::int64_t>(weights.size()) - 1; }
    double mass(std::int64_t x) const noexcept
    {
        return (x < lo() || x > hi()) ? 0.0 : weights[static_cast<std::size_t>(x - offset)];
    }
    double total() const noexcept;

    void write_csv(std::ostream& out, const Metadata& meta) const;
};

/// Distribution of A + B for independent A ~ a, B ~ b.
LatticePmf convolve(const LatticePmf& a, const LatticePmf& b);

struct Trajectory {
    std::vector<std::int64_t> positions; // positions[0] == 0
    std::uint64_t seed = 0;

    std::int64_t endpoint() const noexcept { return positions.back(); }
    void write_csv(std::ostream& out, const Metadata& meta) const;
};

/// Exact quenched law of Z_n started at 0. Reads ω on [−(n−1), n−1];
/// explicit environments that do not cover it raise WindowTooSmall.
LatticePmf evolve_pmf(const Environment& env, std::uint64_t n);

/// log E^ω_0[e^{λ Z_n}] by the same forward recursion with tilted weights,
/// renormalized every step.
double quenched_logmgf(const Environment& env, std::uint64_t n, double lambda);

Trajectory sample_path(const Environment& env, std::uint64_t n, std::uint64_t seed);

/// Endpoint of sample_path without storing the trajectory.
std::int64_t sample_endpoint(const Environment& env, std::uint64_t n, std::uint64_t seed);

struct HittingTime {
    std::uint64_t steps; // H_level, or the cap when censored
    bool censored;
};

HittingTime sample_hitting(const Environment& env, std::uint64_t level, std::uint64_t seed,
                           std::uint64_t cap);

/// How an interval's walk reads its environment ω_k.
///   recentered: ω_k(X_t − X_{τ(k−1)}), each interval starts at the origin of
///               its own environment. Increments Y_k are exactly Z_{T_k} in ω_k.
///   absolute:   ω_k(X_t), the kernel read literally at the absolute position.
/// The two agree in annealed law.
enum class Frame { recentered, absolute };

std::string_view frame_name(Frame f);

/// Lazy environment ω_k of interval k ≥ 1 under the environment master seed.
Environment interval_environment(const AlphaDistribution& dist, std::uint64_t env_seed,
                                 std::uint64_t k);

/// Walk stream of interval k; in the recentered frame the increment Y_k is
/// sample_endpoint(interval_environment(..., k), T_k, interval_walk_seed(walk_seed, k)).
std::uint64_t interval_walk_seed(std::uint64_t walk_seed, std::uint64_t k);

/// Exact quenched law of X_n for a fixed environment sequence.
LatticePmf rwcre_pmf(const AlphaDistribution& dist, const CoolingMap& map, std::uint64_t n,
                     std::uint64_t env_seed, Frame frame = Frame::recentered);

Trajectory rwcre_sample(const AlphaDistribution& dist, const CoolingMap& map, std::uint64_t n,
                        std::uint64_t env_seed, std::uint64_t walk_seed,
                        Frame frame = Frame::recentered);

/// (Y_1, ..., Y_{ℓ(n)−1}, Ȳⁿ) read off a trajectory of length n + 1.
std::vector<std::int64_t> refreshed_increments(const Trajectory& path, const CoolingMap& map);

} // namespace coolwalk
