#include "coolwalk/cet.hpp"

#include "coolwalk/error.hpp"
#include "coolwalk/format.hpp"
#include "coolwalk/rng.hpp"
#include "coolwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace coolwalk {

namespace {

// Neumaier compensated sum; the deterministic provider should give L back
// to the last bit or close to it.
class Accumulator {
public:
    void add(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double pmf_mean(const LatticePmf& pmf)
{
    Accumulator acc;
    for (std::size_t i = 0; i < pmf.weights.size(); ++i)
        acc.add(pmf.weights[i] * static_cast<double>(pmf.offset + static_cast<std::int64_t>(i)));
    return acc.value();
}

MeanValue require_mean(const ArrayProvider& provider, std::uint64_t k, std::uint64_t n, std::uint64_t seed)
{
    const auto m = provider.mean(k, n, seed);
    if (!m)
        throw Error(ErrorCode::MeansUnavailable, provider.describe() + " has no mean for k=" +
                                                     std::to_string(k) + ", n=" + std::to_string(n));
    return *m;
}

} // namespace

// --- providers -------------------------------------------------------------

DeterministicProvider::DeterministicProvider(double limit)
    : limits_([limit](std::uint64_t) { return limit; }),
      bound_(std::abs(limit)),
      label_("deterministic(L=" + format_double(limit) + ")")
{
}

DeterministicProvider::DeterministicProvider(std::function<double(std::uint64_t)> limits, double bound,
                                             std::string label)
    : limits_(std::move(limits)), bound_(bound), label_(std::move(label))
{
}

double DeterministicProvider::value(std::uint64_t k, std::uint64_t n, std::uint64_t) const
{
    return static_cast<double>(n) * limits_(k);
}

std::optional<MeanValue> DeterministicProvider::mean(std::uint64_t k, std::uint64_t, std::uint64_t) const
{
    return MeanValue{limits_(k), true};
}

IidProvider::IidProvider(double limit, double half_width) : limit_(limit), half_width_(half_width)
{
    if (!(half_width >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "half width must be non-negative");
}

double IidProvider::value(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const
{
    const std::uint64_t key = derive_seed(seed, streams::provider, k);
    Accumulator acc;
    for (std::uint64_t i = 0; i < n; ++i)
        acc.add(limit_ + half_width_ * (2.0 * counter_uniform(key, static_cast<std::int64_t>(i)) - 1.0));
    return acc.value();
}

std::optional<MeanValue> IidProvider::mean(std::uint64_t, std::uint64_t, std::uint64_t) const
{
    return MeanValue{limit_, true};
}

std::string IidProvider::describe() const
{
    return "iid-uniform(L=" + format_double(limit_) + ",h=" + format_double(half_width_) + ")";
}

DisplacementProvider::DisplacementProvider(AlphaDistribution dist, std::uint64_t exact_cap,
                                           std::uint64_t replicas)
    : dist_(std::move(dist)), exact_cap_(exact_cap), replicas_(replicas)
{
}

double DisplacementProvider::value(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const
{
    return static_cast<double>(
        sample_endpoint(interval_environment(dist_, seed, k), n, interval_walk_seed(seed, k)));
}

std::optional<MeanValue> DisplacementProvider::mean(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const
{
    if (n == 0)
        return MeanValue{0.0, true};
    const Environment env = interval_environment(dist_, seed, k);
    if (n <= exact_cap_)
        return MeanValue{pmf_mean(evolve_pmf(env, n)) / static_cast<double>(n), true};
    if (replicas_ == 0)
        return std::nullopt;
    const std::uint64_t walk = interval_walk_seed(seed, k);
    Accumulator acc;
    for (std::uint64_t r = 0; r < replicas_; ++r)
        acc.add(static_cast<double>(sample_endpoint(env, n, derive_seed(walk, streams::replica, r))));
    return MeanValue{acc.value() / static_cast<double>(replicas_) / static_cast<double>(n), false};
}

std::string DisplacementProvider::describe() const
{
    return "rwre-displacement(dist=" + dist_.id() + ")";
}

LogMgfProvider::LogMgfProvider(AlphaDistribution dist, double lambda, std::uint64_t replicas)
    : dist_(std::move(dist)), lambda_(lambda), replicas_(replicas)
{
}

double LogMgfProvider::value(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const
{
    return quenched_logmgf(interval_environment(dist_, seed, k), n, lambda_);
}

std::optional<MeanValue> LogMgfProvider::mean(std::uint64_t k, std::uint64_t n, std::uint64_t seed) const
{
    if (n == 0 || lambda_ == 0.0)
        return MeanValue{0.0, true};
    if (replicas_ == 0)
        return std::nullopt;
    Accumulator acc;
    for (std::uint64_t r = 0; r < replicas_; ++r)
        acc.add(value(k, n, derive_seed(seed, streams::replica, r)));
    return MeanValue{acc.value() / static_cast<double>(replicas_) / static_cast<double>(n), false};
}

std::string LogMgfProvider::describe() const
{
    return "rwre-logmgf(dist=" + dist_.id() + ",lambda=" + format_double(lambda_) + ")";
}

// --- sums and decomposition ------------------------------------------------

CoolingWeights cooling_weights(const CoolingMap& map, std::uint64_t n)
{
    if (n == 0)
        throw Error(ErrorCode::InvalidArgument, "cooling weights need n >= 1");
    CoolingWeights w;
    w.n = n;
    auto pieces = map.pieces(n);
    w.bar_t = pieces.back();
    pieces.pop_back();
    w.lengths = std::move(pieces);
    const double scale = static_cast<double>(n);
    for (std::uint64_t t : w.lengths)
        w.gamma.push_back(static_cast<double>(t) / scale);
    w.gamma_bar = static_cast<double>(w.bar_t) / scale;
    return w;
}

double cooling_sum(const ArrayProvider& provider, const CoolingMap& map, std::uint64_t n, std::uint64_t seed)
{
    const CoolingWeights w = cooling_weights(map, n);
    Accumulator acc;
    for (std::size_t i = 0; i < w.lengths.size(); ++i)
        acc.add(provider.value(i + 1, w.lengths[i], seed));
    if (w.bar_t > 0)
        acc.add(provider.value(w.lengths.size() + 1, w.bar_t, seed));
    return acc.value() / static_cast<double>(n);
}

RbdRow rbd_decompose(const ArrayProvider& provider, const CoolingMap& map, std::uint64_t n, double L,
                     std::uint64_t seed)
{
    const CoolingWeights w = cooling_weights(map, n);
    RbdRow row;
    row.n = n;
    row.seed = seed;
    row.means_exact = true;
    Accumulator total, R, D;
    for (std::size_t i = 0; i < w.lengths.size(); ++i) {
        const std::uint64_t k = i + 1;
        const std::uint64_t t = w.lengths[i];
        const double psi = provider.value(k, t, seed);
        const MeanValue m = require_mean(provider, k, t, seed);
        row.means_exact = row.means_exact && m.exact;
        const double c = (psi - static_cast<double>(t) * m.value) / static_cast<double>(t);
        total.add(psi);
        R.add(w.gamma[i] * c);
        D.add(w.gamma[i] * (m.value - L));
        row.centered.push_back(c);
        row.means.push_back(m.value);
    }
    if (w.bar_t > 0) {
        const std::uint64_t k = w.lengths.size() + 1;
        const double psi = provider.value(k, w.bar_t, seed);
        const MeanValue m = require_mean(provider, k, w.bar_t, seed);
        row.means_exact = row.means_exact && m.exact;
        row.centered_bar = (psi - static_cast<double>(w.bar_t) * m.value) / static_cast<double>(w.bar_t);
        row.mean_bar = m.value;
        total.add(psi);
        row.B = w.gamma_bar * row.centered_bar;
        D.add(w.gamma_bar * (m.value - L));
    }
    row.total = total.value() / static_cast<double>(n);
    row.R = R.value();
    row.D = D.value();
    row.deviation = std::abs(row.total - L);
    return row;
}

double max_observed_increment(const ArrayProvider& provider, std::uint64_t k_max, std::uint64_t n_max,
                              std::uint64_t seed, std::size_t samples)
{
    if (k_max == 0 || n_max == 0)
        throw Error(ErrorCode::InvalidArgument, "k_max and n_max must be positive");
    SplitMix64 rng(derive_seed(seed, streams::reference));
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const auto k = 1 + static_cast<std::uint64_t>(rng.uniform() * static_cast<double>(k_max));
        const auto n = static_cast<std::uint64_t>(rng.uniform() * static_cast<double>(n_max));
        worst = std::max(worst, std::abs(provider.value(k, n + 1, seed) - provider.value(k, n, seed)));
    }
    return worst;
}

// --- report ----------------------------------------------------------------

std::size_t count_inversions(std::span<const double> values)
{
    std::size_t count = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        count += values[i] > values[i - 1] ? 1 : 0;
    return count;
}

double fit_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "slope fit needs at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0)
        throw Error(ErrorCode::InvalidArgument, "slope fit needs distinct x values");
    return sxy / sxx;
}

double median(std::vector<double> values)
{
    if (values.empty())
        throw Error(ErrorCode::InvalidArgument, "median of nothing");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

CETReport convergence_report(const ArrayProvider& provider, const CoolingMap& map,
                             std::span<const std::uint64_t> n_grid, std::span<const std::uint64_t> seeds,
                             double L, Exec exec)
{
    if (n_grid.empty() || seeds.empty())
        throw Error(ErrorCode::InvalidArgument, "empty n grid or seed list");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] == 0 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "n grid must be positive and increasing");
    }
    CETReport report;
    report.provider = provider.describe();
    report.map = map.describe();
    report.L = L;
    report.n_grid.assign(n_grid.begin(), n_grid.end());
    report.seeds.assign(seeds.begin(), seeds.end());
    report.no_cooling = !map.cooling();
    report.rows.resize(n_grid.size() * seeds.size());
    std::vector<char> has_means(report.rows.size(), 1);

    for_each_cell(report.rows.size(), exec, [&](std::size_t cell) {
        const std::uint64_t n = n_grid[cell / seeds.size()];
        const std::uint64_t seed = seeds[cell % seeds.size()];
        try {
            report.rows[cell] = rbd_decompose(provider, map, n, L, seed);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MeansUnavailable)
                throw;
            RbdRow row;
            row.n = n;
            row.seed = seed;
            row.total = cooling_sum(provider, map, n, seed);
            row.R = row.B = row.D = std::nan("");
            row.deviation = std::abs(row.total - L);
            report.rows[cell] = std::move(row);
            has_means[cell] = 0;
        }
    });

    for (std::size_t cell = 0; cell < report.rows.size(); ++cell) {
        report.means_available = report.means_available && has_means[cell];
        report.means_exact = report.means_exact && has_means[cell] && report.rows[cell].means_exact;
    }
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        std::vector<double> devs;
        for (std::size_t j = 0; j < seeds.size(); ++j)
            devs.push_back(report.rows[i * seeds.size() + j].deviation);
        report.median_deviation.push_back(median(std::move(devs)));
    }
    report.inversions = count_inversions(report.median_deviation);
    report.trend_ok = report.inversions <= 1;

    double acc = 0.0;
    for (std::size_t j = 0; j < seeds.size(); ++j)
        acc += report.rows[(n_grid.size() - 1) * seeds.size() + j].total;
    report.limit_estimate = acc / static_cast<double>(seeds.size());

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (report.median_deviation[i] > 0.0) {
            lx.push_back(std::log(static_cast<double>(n_grid[i])));
            ly.push_back(std::log(report.median_deviation[i]));
        }
    }
    report.decay_exponent = lx.size() >= 2 ? fit_slope(lx, ly) : 0.0;
    return report;
}

void CETReport::write_csv(std::ostream& out, const Metadata& meta) const
{
    Metadata m = meta;
    m.add("provider", provider)
        .add("map", map)
        .add("L", format_double(L))
        .add("means", !means_available ? "unavailable" : means_exact ? "exact" : "estimated")
        .add("limit_estimate", format_double(limit_estimate))
        .add("inversions", std::to_string(inversions))
        .add("trend_ok", trend_ok ? "1" : "0")
        .add("decay_exponent", format_double(decay_exponent));
    if (no_cooling)
        m.add("no_cooling", "1");
    Table table({"n", "seed", "total", "R", "B", "D", "deviation"});
    for (const RbdRow& r : rows)
        table.add_row({std::to_string(r.n), std::to_string(r.seed), format_double(r.total), format_double(r.R),
                       format_double(r.B), format_double(r.D), format_double(r.deviation)});
    table.write_csv(out, m);
}

} // namespace coolwalk
