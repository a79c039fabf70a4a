#include "coolwalk/ratefn.hpp"

#include "coolwalk/error.hpp"
#include "coolwalk/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace coolwalk {

GridFunction::GridFunction(std::vector<double> xs, std::vector<double> ys, bool convex)
    : xs_(std::move(xs)), ys_(std::move(ys)), convex_(convex)
{
    if (xs_.size() != ys_.size())
        throw Error(ErrorCode::InvalidArgument, "grid and value arrays differ in length");
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        if (!(xs_[i] > xs_[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "grid is not strictly increasing");
    }
    int runs = 0;
    for (std::size_t i = 0; i < ys_.size(); ++i) {
        if (std::isnan(ys_[i]) || ys_[i] == -infinity)
            throw Error(ErrorCode::InvalidArgument, "grid values must be finite or +inf");
        if (finite(i) && (i == 0 || !finite(i - 1)))
            ++runs;
    }
    if (runs > 1)
        throw Error(ErrorCode::InvalidArgument, "finite values are not contiguous");
}

std::optional<std::pair<std::size_t, std::size_t>> GridFunction::finite_range() const noexcept
{
    std::optional<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < ys_.size(); ++i) {
        if (!finite(i))
            continue;
        if (!out)
            out.emplace(i, i);
        else
            out->second = i;
    }
    return out;
}

double GridFunction::operator()(double x) const noexcept
{
    if (xs_.empty() || x < xs_.front() || x > xs_.back())
        return infinity;
    const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
    const auto j = static_cast<std::size_t>(it - xs_.begin());
    if (xs_[j] == x)
        return ys_[j];
    const std::size_t i = j - 1;
    if (!finite(i) || !finite(j))
        return infinity;
    const double t = (x - xs_[i]) / (xs_[j] - xs_[i]);
    return ys_[i] + t * (ys_[j] - ys_[i]);
}

bool GridFunction::check_convex(double tol) const noexcept
{
    const auto range = finite_range();
    if (!range)
        return true;
    const auto [first, last] = *range;
    for (std::size_t i = first + 1; i + 1 <= last; ++i) {
        const double left = (ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]);
        const double right = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
        if (right - left < -tol)
            return false;
    }
    return true;
}

void GridFunction::write_csv(std::ostream& out, const Metadata& meta) const
{
    write_metadata(out, meta);
    out << "x,y,is_infinite\n";
    for (std::size_t i = 0; i < xs_.size(); ++i)
        out << format_double(xs_[i]) << ',' << format_double(ys_[i]) << ','
            << (finite(i) ? 0 : 1) << '\n';
}

// --- continued fraction ----------------------------------------------------

CFState hitting_cf_step(CFState prev, double omega_x, double lambda)
{
    if (prev.diverged)
        return prev;
    const double e = std::exp(lambda);
    const double denom = 1.0 - (1.0 - omega_x) * e * prev.phi;
    if (!(denom > 0.0))
        return {infinity, true};
    return {omega_x * e / denom, false};
}

std::optional<double> homogeneous_cf_fixed_point(double p, double lambda)
{
    // (1 − p) e^λ φ² − φ + p e^λ = 0
    const double e = std::exp(lambda);
    const double q = 1.0 - p;
    if (q == 0.0)
        return p * e;
    const double disc = 1.0 - 4.0 * p * q * e * e;
    if (disc < 0.0)
        return std::nullopt;
    // Rationalized smaller root, stable when (1 − p) e^λ is small.
    return 2.0 * p * e / (1.0 + std::sqrt(disc));
}

double hitting_logmgf_rate(const Environment& env, std::uint64_t n, double lambda,
                           std::uint64_t warmup)
{
    if (n == 0)
        throw Error(ErrorCode::InvalidArgument, "hitting level must be positive");
    // MGF at 0 of an a.s. finite passage time.
    if (lambda == 0.0)
        return 0.0;
    const auto first = -static_cast<std::int64_t>(warmup);
    const auto init = homogeneous_cf_fixed_point(env(first), lambda);
    if (!init)
        return infinity;
    CFState state{*init, false};
    for (std::int64_t x = first; x < 0; ++x) {
        state = hitting_cf_step(state, env(x), lambda);
        if (state.diverged)
            return infinity;
    }
    double sum = 0.0;
    double carry = 0.0; // Neumaier compensation
    const auto last = static_cast<std::int64_t>(n);
    for (std::int64_t x = 0; x < last; ++x) {
        state = hitting_cf_step(state, env(x), lambda);
        if (state.diverged)
            return infinity;
        const double term = std::log(state.phi);
        const double t = sum + term;
        carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return (sum + carry) / static_cast<double>(n);
}

double hitting_logmgf_rate(const AlphaDistribution& dist, std::uint64_t n, double lambda,
                           std::uint64_t warmup, std::uint64_t seed)
{
    const Environment env = Environment::sample(dist, -static_cast<std::int64_t>(warmup),
                                                static_cast<std::size_t>(warmup + n), seed);
    return hitting_logmgf_rate(env, n, lambda, warmup);
}

std::vector<double> hitting_logmgf_rates(const Environment& env, std::uint64_t n,
                                         std::span<const double> lambdas, std::uint64_t warmup,
                                         Exec exec)
{
    std::vector<double> out(lambdas.size());
    for_each_cell(lambdas.size(), exec,
                  [&](std::size_t i) { out[i] = hitting_logmgf_rate(env, n, lambdas[i], warmup); });
    return out;
}

JStarCurve jstar_curve(const AlphaDistribution& dist, std::span<const double> lambdas,
                       std::uint64_t n, std::uint64_t seed, std::uint64_t warmup, Exec exec)
{
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw Error(ErrorCode::InvalidArgument, "lambda grid must be sorted");
    const Environment env = Environment::sample(dist, -static_cast<std::int64_t>(warmup),
                                                static_cast<std::size_t>(warmup + n), seed);
    std::vector<double> ys = hitting_logmgf_rates(env, n, lambdas, warmup, exec);
    // Sites with p <= 1/2 form arbitrarily deep traps, so the true critical
    // point is 0; a finite window only sees traps of bounded depth and stays
    // finite a little past it.
    const bool traps = std::any_of(dist.atoms().begin(), dist.atoms().end(),
                                   [](const Atom& a) { return a.p <= 0.5; });
    if (traps) {
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (lambdas[i] > 0.0)
                ys[i] = infinity;
    }

    JStarCurve curve;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ys[i] < infinity)
            continue;
        if (i > 0 && ys[i - 1] < infinity)
            curve.critical.emplace(lambdas[i - 1], lambdas[i]);
        else if (i == 0)
            curve.critical.emplace(-infinity, lambdas[0]);
        std::fill(ys.begin() + static_cast<std::ptrdiff_t>(i), ys.end(), infinity);
        break;
    }
    curve.monotone = true;
    for (std::size_t i = 1; i < ys.size(); ++i) {
        if (ys[i] < infinity && ys[i] < ys[i - 1])
            curve.monotone = false;
    }
    std::vector<double> xs(lambdas.begin(), lambdas.end());
    GridFunction tmp(xs, ys);
    const bool convex = tmp.check_convex();
    curve.values = GridFunction(std::move(xs), std::move(ys), convex);
    return curve;
}

// --- duality ---------------------------------------------------------------

GridFunction legendre(const GridFunction& f, std::span<const double> out_grid)
{
    const auto range = f.finite_range();
    if (!range)
        throw Error(ErrorCode::EmptyFinitePart, "cannot conjugate a function that is +inf everywhere");
    const auto [first, last] = *range;
    const auto xs = f.xs();
    const auto ys = f.ys();
    std::vector<double> out(out_grid.size());
    for (std::size_t j = 0; j < out_grid.size(); ++j) {
        const double y = out_grid[j];
        double best = -infinity;
        for (std::size_t i = first; i <= last; ++i)
            best = std::max(best, y * xs[i] - ys[i]);
        out[j] = best;
    }
    return GridFunction(std::vector<double>(out_grid.begin(), out_grid.end()), std::move(out), true);
}

GridFunction jtilde(const GridFunction& J, double mean_log_rho)
{
    std::vector<double> ys(J.ys().begin(), J.ys().end());
    for (double& y : ys) {
        if (y < infinity)
            y -= mean_log_rho;
    }
    return GridFunction(std::vector<double>(J.xs().begin(), J.xs().end()), std::move(ys), J.convex());
}

GridFunction rate_I_from_J(const GridFunction& J, double mean_log_rho, std::span<const double> xs)
{
    const GridFunction left = jtilde(J, mean_log_rho);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if (x < -1.0 || x > 1.0) {
            ys[i] = infinity;
            continue;
        }
        if (x == 0.0) {
            ys[i] = 0.0;
            continue;
        }
        const double u = std::abs(x);
        const double value = x > 0.0 ? J(1.0 / u) : left(1.0 / u);
        if (!(value < infinity))
            throw Error(ErrorCode::InvalidArgument,
                        "J is not finite at 1/|x| = " + format_double(1.0 / u));
        ys[i] = u * value;
    }
    std::vector<double> grid(xs.begin(), xs.end());
    GridFunction tmp(grid, ys);
    const bool convex = tmp.check_convex();
    return GridFunction(std::move(grid), std::move(ys), convex);
}

GridFunction istar_from_I(const GridFunction& I, std::span<const double> lambdas)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < I.size(); ++i) {
        if (I.xs()[i] >= -1.0 && I.xs()[i] <= 1.0) {
            xs.push_back(I.xs()[i]);
            ys.push_back(I.ys()[i]);
        }
    }
    return legendre(GridFunction(std::move(xs), std::move(ys)), lambdas);
}

// --- grids -----------------------------------------------------------------

std::vector<double> GridSpec::build() const
{
    if (points < 2 || !(hi > lo))
        throw Error(ErrorCode::InvalidArgument, "grid needs at least two points on a non-empty range");
    std::vector<double> out;
    out.reserve(points + 2 * refine_near_zero);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        double v = lo + step * static_cast<double>(i);
        if (std::abs(v) < 1e-12 * step)
            v = 0.0;
        out.push_back(v);
    }
    out.back() = hi;
    if (refine_near_zero > 0) {
        const double top = std::log10(step);
        const double bottom = -6.0;
        for (std::size_t i = 0; i < refine_near_zero; ++i) {
            const double e = refine_near_zero == 1
                ? bottom
                : bottom + (top - bottom) * static_cast<double>(i) / static_cast<double>(refine_near_zero);
            const double v = std::pow(10.0, e);
            if (-v > lo)
                out.push_back(-v);
            if (v < hi)
                out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> reciprocal_grid(std::span<const double> xs)
{
    std::vector<double> out;
    for (double x : xs) {
        const double u = std::abs(x);
        if (u > 0.0 && u <= 1.0)
            out.push_back(1.0 / u);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RateChain compute_rate_chain(const AlphaDistribution& dist, std::span<const double> lambdas,
                             std::span<const double> xs, std::uint64_t n, std::uint64_t seed,
                             std::uint64_t warmup, Exec exec)
{
    RateChain chain;
    chain.mean_log_rho = rho_moments(dist).mean_log_rho;
    chain.jstar = jstar_curve(dist, lambdas, n, seed, warmup, exec);
    chain.J = legendre(chain.jstar.values, reciprocal_grid(xs));
    chain.I = rate_I_from_J(chain.J, chain.mean_log_rho, xs);
    chain.istar = istar_from_I(chain.I, lambdas);
    return chain;
}

// --- blocks ----------------------------------------------------------------

std::vector<BlockRate> empirical_block_rate(const LatticePmf& pmf, std::uint64_t n,
                                            std::uint64_t blocks_per_side, double v)
{
    if (n == 0 || blocks_per_side == 0)
        throw Error(ErrorCode::InvalidArgument, "n and N must be positive");
    const auto N = static_cast<std::int64_t>(blocks_per_side);
    const auto nn = static_cast<std::int64_t>(n);
    if (pmf.lo() < -nn || pmf.hi() > nn)
        throw Error(ErrorCode::InvalidArgument, "pmf support exceeds [-n, n]");

    // Block i covers (i/N, (i+1)/N]; block −N also includes −1.
    std::vector<double> masses(static_cast<std::size_t>(2 * N), 0.0);
    for (std::int64_t x = pmf.lo(); x <= pmf.hi(); ++x) {
        const double m = pmf.mass(x);
        if (m == 0.0)
            continue;
        // ceil(xN / n) − 1 in exact integer arithmetic
        const std::int64_t num = x * N;
        const std::int64_t q = num / nn;
        const std::int64_t ceil = q + ((num % nn != 0 && num > 0) ? 1 : 0);
        const std::int64_t i = std::max(-N, ceil - 1);
        masses[static_cast<std::size_t>(i + N)] += m;
    }

    const double nd = static_cast<double>(n);
    const auto rate_of = [nd](double mass) { return mass > 0.0 ? -std::log(mass) / nd : infinity; };
    const auto edge = [N](std::int64_t i) { return static_cast<double>(i) / static_cast<double>(N); };

    std::vector<BlockRate> out;
    const std::int64_t merged_top = v > 0.0 ? static_cast<std::int64_t>(std::floor(v * static_cast<double>(N))) : -1;
    for (std::int64_t i = -N; i < N; ++i) {
        const double m = masses[static_cast<std::size_t>(i + N)];
        if (i == 0 && merged_top >= 0) {
            double merged = 0.0;
            const std::int64_t top = std::min(merged_top, N - 1);
            for (std::int64_t j = 0; j <= top; ++j)
                merged += masses[static_cast<std::size_t>(j + N)];
            out.push_back({0.0, edge(top + 1), false, merged, rate_of(merged)});
            i = top;
            continue;
        }
        out.push_back({edge(i), edge(i + 1), i == -N, m, rate_of(m)});
    }
    return out;
}

} // namespace coolwalk
