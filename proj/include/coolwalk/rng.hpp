#pragma once

#include <cstdint>
#include <limits>

namespace coolwalk {

// SplitMix64 finalizer. Bijective on 64-bit words, good avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for (stream, index) under a master seed. Used for every
/// replica, interval environment and walk so that any cell can be replayed
/// without running the ones before it.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept
{
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
    return mix64(h ^ (index * 0x9e3779b97f4a7c15ULL + 0x8cb92ba72f3d8dd7ULL));
}

/// Top 53 bits to a double in [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based uniform: a pure function of (key, counter).
constexpr double counter_uniform(std::uint64_t key, std::int64_t counter) noexcept
{
    const auto c = static_cast<std::uint64_t>(counter);
    return to_unit(mix64(key ^ mix64(c + 0x9e3779b97f4a7c15ULL)));
}

// Sequential SplitMix64 stream; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    constexpr double uniform() noexcept { return to_unit((*this)()); }

private:
    std::uint64_t state_;
};

// Stream tags for derive_seed. Fixed forever: changing one changes outputs.
namespace streams {
inline constexpr std::uint64_t interval_env = 1;
inline constexpr std::uint64_t walk = 2;
inline constexpr std::uint64_t replica = 3;
inline constexpr std::uint64_t environment = 4;
inline constexpr std::uint64_t provider = 5;
inline constexpr std::uint64_t reference = 6;
} // namespace streams

} // namespace coolwalk
