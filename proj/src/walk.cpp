#include "coolwalk/walk.hpp"

#include "coolwalk/error.hpp"
#include "coolwalk/format.hpp"
#include "coolwalk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace coolwalk {

double LatticePmf::total() const noexcept
{
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void LatticePmf::write_csv(std::ostream& out, const Metadata& meta) const
{
    write_metadata(out, meta);
    out << "site,mass\n";
    for (std::size_t i = 0; i < weights.size(); ++i)
        out << offset + static_cast<std::int64_t>(i) << ',' << format_double(weights[i]) << '\n';
}

void Trajectory::write_csv(std::ostream& out, const Metadata& meta) const
{
    write_metadata(out, meta);
    out << "t,position\n";
    for (std::size_t t = 0; t < positions.size(); ++t)
        out << t << ',' << positions[t] << '\n';
}

LatticePmf convolve(const LatticePmf& a, const LatticePmf& b)
{
    LatticePmf out;
    out.offset = a.offset + b.offset;
    out.weights.assign(a.weights.size() + b.weights.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
        const double wa = a.weights[i];
        if (wa == 0.0)
            continue;
        double* dst = out.weights.data() + i;
        const double* src = b.weights.data();
        for (std::size_t j = 0; j < b.weights.size(); ++j)
            dst[j] += wa * src[j];
    }
    return out;
}

namespace {

// Forward recursion on the dense window [−n, n]. Buffers are padded by one
// slot on each side so the stencil never branches. `up[i]`, `down[i]` are the
// (possibly tilted) step weights at array index i (site i − n − 1).
struct StepWeights {
    std::vector<double> up;
    std::vector<double> down;
};

StepWeights step_weights(const Environment& env, std::uint64_t n, double up_scale,
                         double down_scale)
{
    const auto reach = static_cast<std::int64_t>(n) - 1;
    const std::vector<double> omega = env.slice(-reach, reach);
    const std::size_t width = 2 * n + 3;
    StepWeights w{std::vector<double>(width, 0.0), std::vector<double>(width, 0.0)};
    for (std::size_t j = 0; j < omega.size(); ++j) {
        // site −reach + j sits at index j + 2
        w.up[j + 2] = omega[j] * up_scale;
        w.down[j + 2] = (1.0 - omega[j]) * down_scale;
    }
    return w;
}

} // namespace

LatticePmf evolve_pmf(const Environment& env, std::uint64_t n)
{
    if (n == 0)
        return LatticePmf{0, {1.0}};
    const StepWeights w = step_weights(env, n, 1.0, 1.0);
    const std::size_t width = 2 * n + 3;
    const std::size_t center = n + 1;
    std::vector<double> cur(width, 0.0);
    std::vector<double> next(width, 0.0);
    cur[center] = 1.0;
    const double* up = w.up.data();
    const double* down = w.down.data();
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t lo = center - t - 1;
        const std::size_t hi = center + t + 1;
        const double* c = cur.data();
        double* d = next.data();
        for (std::size_t i = lo; i <= hi; ++i)
            d[i] = c[i - 1] * up[i - 1] + c[i + 1] * down[i + 1];
        std::swap(cur, next);
    }
    LatticePmf out;
    out.offset = -static_cast<std::int64_t>(n);
    out.weights.assign(cur.begin() + 1, cur.end() - 1);
    return out;
}

double quenched_logmgf(const Environment& env, std::uint64_t n, double lambda)
{
    if (lambda == 0.0 || n == 0)
        return 0.0;
    const StepWeights w = step_weights(env, n, std::exp(lambda), std::exp(-lambda));
    const std::size_t width = 2 * n + 3;
    const std::size_t center = n + 1;
    std::vector<double> cur(width, 0.0);
    std::vector<double> next(width, 0.0);
    cur[center] = 1.0;
    double log_scale = 0.0;
    const double* up = w.up.data();
    const double* down = w.down.data();
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t lo = center - t - 1;
        const std::size_t hi = center + t + 1;
        const double* c = cur.data();
        double* d = next.data();
        double peak = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) {
            d[i] = c[i - 1] * up[i - 1] + c[i + 1] * down[i + 1];
            peak = std::max(peak, d[i]);
        }
        const double inv = 1.0 / peak;
        for (std::size_t i = lo; i <= hi; ++i)
            d[i] *= inv;
        log_scale += std::log(peak);
        std::swap(cur, next);
    }
    double sum = 0.0;
    for (double v : cur)
        sum += v;
    return log_scale + std::log(sum);
}

Trajectory sample_path(const Environment& env, std::uint64_t n, std::uint64_t seed)
{
    Trajectory path;
    path.seed = seed;
    path.positions.resize(n + 1);
    SplitMix64 rng(seed);
    std::int64_t x = 0;
    path.positions[0] = 0;
    for (std::uint64_t t = 0; t < n; ++t) {
        x += rng.uniform() < env(x) ? 1 : -1;
        path.positions[t + 1] = x;
    }
    return path;
}

std::int64_t sample_endpoint(const Environment& env, std::uint64_t n, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    std::int64_t x = 0;
    for (std::uint64_t t = 0; t < n; ++t)
        x += rng.uniform() < env(x) ? 1 : -1;
    return x;
}

HittingTime sample_hitting(const Environment& env, std::uint64_t level, std::uint64_t seed,
                           std::uint64_t cap)
{
    if (level == 0)
        throw Error(ErrorCode::InvalidArgument, "hitting level must be positive");
    if (cap < level)
        throw Error(ErrorCode::InvalidArgument, "cap must be at least the level");
    SplitMix64 rng(seed);
    const auto target = static_cast<std::int64_t>(level);
    std::int64_t x = 0;
    for (std::uint64_t t = 1; t <= cap; ++t) {
        x += rng.uniform() < env(x) ? 1 : -1;
        if (x == target)
            return {t, false};
    }
    return {cap, true};
}

std::string_view frame_name(Frame f)
{
    return f == Frame::recentered ? "recentered" : "absolute";
}

Environment interval_environment(const AlphaDistribution& dist, std::uint64_t env_seed,
                                 std::uint64_t k)
{
    return Environment::lazy(dist, derive_seed(env_seed, streams::interval_env, k));
}

namespace {

LatticePmf rwcre_pmf_recentered(const AlphaDistribution& dist, const CoolingMap& map,
                                std::uint64_t n, std::uint64_t env_seed)
{
    const std::vector<std::uint64_t> pieces = map.pieces(n);
    LatticePmf acc{0, {1.0}};
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const std::uint64_t len = pieces[i];
        if (len == 0)
            continue;
        const std::uint64_t k = i + 1;
        const auto seed = derive_seed(env_seed, streams::interval_env, k);
        const auto reach = static_cast<std::int64_t>(len) - 1;
        const Environment env = reach >= 0
            ? Environment::sample(dist, -reach, static_cast<std::size_t>(2 * reach + 1), seed)
            : Environment::lazy(dist, seed);
        acc = convolve(acc, evolve_pmf(env, len));
    }
    return acc;
}

LatticePmf rwcre_pmf_absolute(const AlphaDistribution& dist, const CoolingMap& map,
                              std::uint64_t n, std::uint64_t env_seed)
{
    if (n == 0)
        return LatticePmf{0, {1.0}};
    const std::vector<std::uint64_t> pieces = map.pieces(n);
    const std::size_t width = 2 * n + 3;
    const std::size_t center = n + 1;
    std::vector<double> cur(width, 0.0);
    std::vector<double> next(width, 0.0);
    std::vector<double> up(width, 0.0);
    std::vector<double> down(width, 0.0);
    cur[center] = 1.0;
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i] == 0)
            continue;
        const Environment env = interval_environment(dist, env_seed, i + 1);
        // Steps t .. t + T − 1 only read sites within distance t + T − 1 of 0.
        const auto reach = static_cast<std::int64_t>(t + pieces[i]) - 1;
        for (std::int64_t x = -reach; x <= reach; ++x) {
            const auto idx = static_cast<std::size_t>(x + static_cast<std::int64_t>(center));
            const double w = env(x);
            up[idx] = w;
            down[idx] = 1.0 - w;
        }
        for (std::uint64_t s = 0; s < pieces[i]; ++s, ++t) {
            const std::size_t lo = center - t - 1;
            const std::size_t hi = center + t + 1;
            for (std::size_t j = lo; j <= hi; ++j)
                next[j] = cur[j - 1] * up[j - 1] + cur[j + 1] * down[j + 1];
            std::swap(cur, next);
        }
    }
    LatticePmf out;
    out.offset = -static_cast<std::int64_t>(n);
    out.weights.assign(cur.begin() + 1, cur.end() - 1);
    return out;
}

} // namespace

LatticePmf rwcre_pmf(const AlphaDistribution& dist, const CoolingMap& map, std::uint64_t n,
                     std::uint64_t env_seed, Frame frame)
{
    return frame == Frame::recentered ? rwcre_pmf_recentered(dist, map, n, env_seed)
                                      : rwcre_pmf_absolute(dist, map, n, env_seed);
}

std::uint64_t interval_walk_seed(std::uint64_t walk_seed, std::uint64_t k)
{
    return derive_seed(walk_seed, streams::walk, k);
}

Trajectory rwcre_sample(const AlphaDistribution& dist, const CoolingMap& map, std::uint64_t n,
                        std::uint64_t env_seed, std::uint64_t walk_seed, Frame frame)
{
    Trajectory path;
    path.seed = walk_seed;
    path.positions.reserve(n + 1);
    path.positions.push_back(0);
    std::int64_t x = 0;
    std::uint64_t k = 1;
    std::uint64_t remaining = n;
    while (remaining > 0) {
        const std::uint64_t len = std::min(map.increment(k), remaining);
        const Environment env = interval_environment(dist, env_seed, k);
        SplitMix64 rng(interval_walk_seed(walk_seed, k));
        const std::int64_t origin = frame == Frame::recentered ? x : 0;
        for (std::uint64_t s = 0; s < len; ++s) {
            x += rng.uniform() < env(x - origin) ? 1 : -1;
            path.positions.push_back(x);
        }
        remaining -= len;
        ++k;
    }
    return path;
}

std::vector<std::int64_t> refreshed_increments(const Trajectory& path, const CoolingMap& map)
{
    if (path.positions.empty())
        throw Error(ErrorCode::InvalidArgument, "empty trajectory");
    const std::uint64_t n = path.positions.size() - 1;
    std::vector<std::int64_t> out;
    std::uint64_t start = 0;
    for (std::uint64_t len : map.pieces(n)) {
        out.push_back(path.positions[start + len] - path.positions[start]);
        start += len;
    }
    return out;
}

} // namespace coolwalk
