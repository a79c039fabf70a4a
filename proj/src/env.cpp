#include "coolwalk/env.hpp"

#include "coolwalk/error.hpp"
#include "coolwalk/format.hpp"
#include "coolwalk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace coolwalk {

namespace {

constexpr double weight_tolerance = 1e-12;

std::string describe_atom(std::size_t i, const Atom& a)
{
    std::ostringstream s;
    s << "atom " << i << " (p=" << format_double(a.p) << ", w=" << format_double(a.weight) << ")";
    return s.str();
}

void check_basic_shape(const std::vector<Atom>& atoms)
{
    if (atoms.empty())
        throw Error(ErrorCode::InvalidArgument, "distribution has no atoms");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Atom& a = atoms[i];
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw Error(ErrorCode::InvalidArgument, describe_atom(i, a) + " has non-positive weight");
        if (!(a.p >= 0.0 && a.p <= 1.0))
            throw Error(ErrorCode::InvalidArgument, describe_atom(i, a) + " is not a probability");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > weight_tolerance)
        throw Error(ErrorCode::WeightSum,
                    "weights sum to " + format_double(total) + ", expected 1");
}

double rho_of(double p) { return (1.0 - p) / p; }

} // namespace

AlphaDistribution::AlphaDistribution(std::vector<Atom> atoms, double c, bool validated)
    : atoms_(std::move(atoms)), ellipticity_(c), validated_(validated)
{
    cumulative_.reserve(atoms_.size());
    double acc = 0.0;
    for (const Atom& a : atoms_) {
        acc += a.weight;
        cumulative_.push_back(acc);
    }
}

AlphaDistribution AlphaDistribution::reference(std::vector<Atom> atoms)
{
    check_basic_shape(atoms);
    double c = 0.5;
    for (const Atom& a : atoms)
        c = std::min({c, a.p, 1.0 - a.p});
    return AlphaDistribution(std::move(atoms), c, false);
}

AlphaDistribution validate_alpha(std::vector<Atom> atoms, double c)
{
    if (!(c > 0.0 && c <= 0.5))
        throw Error(ErrorCode::InvalidArgument,
                    "ellipticity constant " + format_double(c) + " outside (0, 1/2]");
    check_basic_shape(atoms);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].p < c - 1e-12 || atoms[i].p > 1.0 - c + 1e-12)
            throw Error(ErrorCode::EllipticityViolated,
                        describe_atom(i, atoms[i]) + " outside [c, 1-c] with c=" + format_double(c));
    }
    std::size_t arg_min = 0;
    std::size_t arg_max = 0;
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        if (rho_of(atoms[i].p) < rho_of(atoms[arg_min].p))
            arg_min = i;
        if (rho_of(atoms[i].p) > rho_of(atoms[arg_max].p))
            arg_max = i;
    }
    if (!(rho_of(atoms[arg_min].p) < 1.0))
        throw Error(ErrorCode::NotNested, "rho_min >= 1 at " + describe_atom(arg_min, atoms[arg_min]));
    if (!(rho_of(atoms[arg_max].p) > 1.0))
        throw Error(ErrorCode::NotNested, "rho_max <= 1 at " + describe_atom(arg_max, atoms[arg_max]));
    return AlphaDistribution(std::move(atoms), c, true);
}

std::string AlphaDistribution::id() const
{
    std::string out;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i > 0)
            out += ',';
        out += format_double(atoms_[i].p);
        out += ':';
        out += format_double(atoms_[i].weight);
    }
    return out;
}

double AlphaDistribution::draw(double u) const noexcept
{
    // Scale by the actual total so that weights summing to 1 - 1e-13 still
    // cover [0, 1).
    const double target = u * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                           atoms_.size() - 1);
    return atoms_[idx].p;
}

AlphaDistribution AlphaDistribution::reflected() const
{
    std::vector<Atom> flipped = atoms_;
    for (Atom& a : flipped)
        a.p = 1.0 - a.p;
    return AlphaDistribution(std::move(flipped), ellipticity_, validated_);
}

std::string_view regime_name(Regime r)
{
    switch (r) {
    case Regime::recurrent: return "recurrent";
    case Regime::transient_zero_speed: return "transient-zero-speed";
    case Regime::transient_positive_speed: return "transient-positive-speed";
    }
    return "unknown";
}

RhoMoments rho_moments(const AlphaDistribution& dist)
{
    RhoMoments m{0.0, 0.0, INFINITY, -INFINITY, Regime::recurrent, false};
    for (const Atom& a : dist.atoms()) {
        const double rho = rho_of(a.p);
        m.mean_rho += a.weight * rho;
        m.mean_log_rho += a.weight * std::log(rho);
        m.rho_min = std::min(m.rho_min, rho);
        m.rho_max = std::max(m.rho_max, rho);
    }
    if (m.mean_log_rho == 0.0) {
        m.regime = Regime::recurrent;
    } else if (m.mean_log_rho < 0.0) {
        m.regime = m.mean_rho < 1.0 ? Regime::transient_positive_speed : Regime::transient_zero_speed;
    } else {
        const RhoMoments r = rho_moments(dist.reflected());
        m.regime = r.regime;
        m.reflected = true;
    }
    return m;
}

double rho_power_mean(const AlphaDistribution& dist, double s)
{
    double acc = 0.0;
    for (const Atom& a : dist.atoms())
        acc += a.weight * std::pow(rho_of(a.p), s);
    return acc;
}

Speed speed(const AlphaDistribution& dist)
{
    const RhoMoments m = rho_moments(dist);
    if (m.reflected) {
        const Speed r = speed(dist.reflected());
        return {-r.value, true};
    }
    if (m.mean_rho >= 1.0)
        return {0.0, false};
    // long double so that e.g. p = 3/4 gives 1/2 on the nose
    long double mean = 0.0L;
    for (const Atom& a : dist.atoms())
        mean += static_cast<long double>(a.weight) * (1.0L - a.p) / static_cast<long double>(a.p);
    return {static_cast<double>((1.0L - mean) / (1.0L + mean)), false};
}

double solve_s(const AlphaDistribution& dist, double tol)
{
    const RhoMoments m = rho_moments(dist);
    if (m.mean_rho >= 1.0)
        throw Error(ErrorCode::PreconditionFlatPiece,
                    "<rho> = " + format_double(m.mean_rho) + " >= 1, no flat piece");
    if (!(m.rho_max > 1.0))
        throw Error(ErrorCode::PreconditionNested,
                    "rho_max = " + format_double(m.rho_max) + " <= 1, <rho^s> never reaches 1");

    const auto f = [&](double s) { return rho_power_mean(dist, s) - 1.0; };
    double lo = 1.0;
    double hi = 2.0;
    while (f(hi) <= 0.0)
        hi *= 2.0;
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        mid = 0.5 * (lo + hi);
        const double value = f(mid);
        if (std::abs(value) <= tol && hi - lo < 1e-14 * hi)
            break;
        if (value > 0.0)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 0.0)
            break;
    }
    return mid;
}

double site_value(const AlphaDistribution& dist, std::uint64_t seed, std::int64_t x)
{
    return dist.draw(counter_uniform(seed, x));
}

Environment Environment::sample(const AlphaDistribution& dist, std::int64_t lo, std::size_t len,
                                std::uint64_t seed)
{
    if (len == 0)
        throw Error(ErrorCode::InvalidArgument, "environment length must be positive");
    Environment env = lazy(dist, seed);
    env.lo_ = lo;
    env.values_.resize(len);
    for (std::size_t i = 0; i < len; ++i)
        env.values_[i] = site_value(dist, seed, lo + static_cast<std::int64_t>(i));
    return env;
}

Environment Environment::lazy(const AlphaDistribution& dist, std::uint64_t seed)
{
    Environment env;
    env.seed_ = seed;
    env.dist_id_ = dist.id();
    env.dist_ = dist;
    return env;
}

Environment Environment::explicit_values(std::int64_t lo, std::vector<double> values)
{
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "site value " + format_double(v) + " is not a probability");
    }
    Environment env;
    env.lo_ = lo;
    env.values_ = std::move(values);
    return env;
}

double Environment::operator()(std::int64_t x) const
{
    if (x >= lo_ && x < end())
        return values_[static_cast<std::size_t>(x - lo_)];
    if (dist_)
        return site_value(*dist_, seed_, x);
    throw Error(ErrorCode::WindowTooSmall,
                "site " + std::to_string(x) + " outside explicit window [" + std::to_string(lo_)
                    + ", " + std::to_string(end() - 1) + "]");
}

std::vector<double> Environment::slice(std::int64_t a, std::int64_t b) const
{
    if (a > b)
        return {};
    std::vector<double> out(static_cast<std::size_t>(b - a + 1));
    for (std::int64_t x = a; x <= b; ++x)
        out[static_cast<std::size_t>(x - a)] = (*this)(x);
    return out;
}

void Environment::write_csv(std::ostream& out) const
{
    out << "# lo=" << lo_ << ",len=" << values_.size() << ",seed=" << seed_
        << ",dist_id=" << dist_id_ << '\n';
    out << "site,omega\n";
    for (std::size_t i = 0; i < values_.size(); ++i)
        out << lo_ + static_cast<std::int64_t>(i) << ',' << format_double(values_[i]) << '\n';
}

// --- cooling maps ---------------------------------------------------------

namespace {
constexpr std::uint64_t increment_ceiling = std::uint64_t{1} << 62;

std::uint64_t clamp_increment(double t)
{
    if (!(t < static_cast<double>(increment_ceiling)))
        return increment_ceiling;
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(t)));
}
} // namespace

CoolingMap::CoolingMap(Kind kind, double parameter, std::vector<std::uint64_t> listed)
    : kind_(kind), parameter_(parameter), listed_(std::move(listed))
{
}

CoolingMap CoolingMap::polynomial(double a)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw Error(ErrorCode::InvalidArgument, "polynomial cooling exponent must be > 0");
    return CoolingMap(Kind::polynomial, a, {});
}

CoolingMap CoolingMap::exponential(double b)
{
    if (!(b > 0.0) || !std::isfinite(b))
        throw Error(ErrorCode::InvalidArgument, "exponential cooling rate must be > 0");
    return CoolingMap(Kind::exponential, b, {});
}

CoolingMap CoolingMap::explicit_increments(std::vector<std::uint64_t> increments)
{
    if (increments.empty())
        throw Error(ErrorCode::InvalidArgument, "explicit cooling map needs at least one increment");
    for (auto t : increments) {
        if (t == 0)
            throw Error(ErrorCode::InvalidArgument, "cooling increments must be positive");
    }
    return CoolingMap(Kind::explicit_list, 0.0, std::move(increments));
}

CoolingMap CoolingMap::constant(std::uint64_t period)
{
    if (period == 0)
        throw Error(ErrorCode::InvalidArgument, "constant cooling period must be >= 1");
    return CoolingMap(Kind::constant, static_cast<double>(period), {});
}

std::uint64_t CoolingMap::increment(std::uint64_t k) const
{
    if (k == 0)
        throw Error(ErrorCode::InvalidArgument, "cooling increments are indexed from k = 1");
    switch (kind_) {
    case Kind::polynomial: return clamp_increment(std::pow(static_cast<double>(k), parameter_));
    case Kind::exponential: return clamp_increment(std::exp(parameter_ * static_cast<double>(k)));
    case Kind::explicit_list: return k <= listed_.size() ? listed_[k - 1] : listed_.back();
    case Kind::constant: return static_cast<std::uint64_t>(parameter_);
    }
    return 1;
}

std::uint64_t CoolingMap::tau(std::uint64_t k) const
{
    std::uint64_t total = 0;
    for (std::uint64_t j = 1; j <= k; ++j)
        total += increment(j);
    return total;
}

CoolingMap::Location CoolingMap::locate(std::uint64_t n) const
{
    std::uint64_t k = 1;
    std::uint64_t start = 0; // τ(k − 1)
    while (true) {
        const std::uint64_t t = increment(k);
        if (t > n - start)
            return {k, n - start};
        start += t;
        ++k;
    }
}

std::vector<std::uint64_t> CoolingMap::pieces(std::uint64_t n) const
{
    std::vector<std::uint64_t> out;
    std::uint64_t k = 1;
    std::uint64_t start = 0;
    while (true) {
        const std::uint64_t t = increment(k);
        if (t > n - start) {
            out.push_back(n - start);
            return out;
        }
        out.push_back(t);
        start += t;
        ++k;
    }
}

std::string_view kind_name(CoolingMap::Kind kind)
{
    switch (kind) {
    case CoolingMap::Kind::polynomial: return "polynomial";
    case CoolingMap::Kind::exponential: return "exponential";
    case CoolingMap::Kind::explicit_list: return "explicit";
    case CoolingMap::Kind::constant: return "constant";
    }
    return "unknown";
}

std::string CoolingMap::describe() const
{
    std::string out(kind_name(kind_));
    switch (kind_) {
    case Kind::polynomial: out += "(a=" + format_double(parameter_) + ")"; break;
    case Kind::exponential: out += "(b=" + format_double(parameter_) + ")"; break;
    case Kind::constant: out += "(T=" + format_double(parameter_) + ",no-cooling)"; break;
    case Kind::explicit_list: {
        out += "(";
        for (std::size_t i = 0; i < listed_.size(); ++i)
            out += (i ? " " : "") + std::to_string(listed_[i]);
        out += ")";
        break;
    }
    }
    return out;
}

} // namespace coolwalk
