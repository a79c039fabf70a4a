#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coolwalk {

/// One support point of the single-site law: ω(x) = p with probability `weight`.
struct Atom {
    double p;
    double weight;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite-support law α of a single site probability ω(x).
///
/// Built either through validate_alpha (i.i.d., uniformly elliptic, nested)
/// or through reference(), which skips ellipticity and nestedness so that
/// homogeneous and degenerate walks can be expressed for cross-checks.
class AlphaDistribution {
public:
    static AlphaDistribution reference(std::vector<Atom> atoms);

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    double ellipticity() const noexcept { return ellipticity_; }
    bool validated() const noexcept { return validated_; }

    /// Canonical identifier, e.g. "0.8:0.7,0.3:0.3" (shortest round-trip decimals).
    std::string id() const;

    /// Inverse-CDF draw from a uniform u in [0, 1).
    double draw(double u) const noexcept;

    /// ω̃ = 1 − ω, the reflected law.
    AlphaDistribution reflected() const;

    friend bool operator==(const AlphaDistribution& a, const AlphaDistribution& b)
    {
        return a.atoms_ == b.atoms_ && a.ellipticity_ == b.ellipticity_
            && a.validated_ == b.validated_;
    }

private:
    friend AlphaDistribution validate_alpha(std::vector<Atom> atoms, double c);
    AlphaDistribution(std::vector<Atom> atoms, double c, bool validated);

    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;
    double ellipticity_ = 0.0;
    bool validated_ = false;
};

/// Throws Error{WeightSum | EllipticityViolated | NotNested | InvalidArgument}
/// naming the offending atom.
AlphaDistribution validate_alpha(std::vector<Atom> atoms, double c);

enum class Regime { recurrent, transient_zero_speed, transient_positive_speed };

std::string_view regime_name(Regime r);

struct RhoMoments {
    double mean_rho;
    double mean_log_rho;
    double rho_min;
    double rho_max;
    Regime regime;
    // Regime is classified on the reflected law when ⟨log ρ⟩ > 0.
    bool reflected;
};

RhoMoments rho_moments(const AlphaDistribution& dist);

/// ⟨ρ^s⟩ over the atoms.
double rho_power_mean(const AlphaDistribution& dist, double s);

struct Speed {
    double value;
    bool reflected; // value is minus the speed of the reflected law
};

/// v_μ: 0 if ⟨ρ⟩ ≥ 1, else (1 − ⟨ρ⟩)/(1 + ⟨ρ⟩).
Speed speed(const AlphaDistribution& dist);

/// Unique s > 1 with ⟨ρ^s⟩ = 1, by bisection. Requires ⟨ρ⟩ < 1 and ρ_max > 1.
double solve_s(const AlphaDistribution& dist, double tol = 1e-12);

/// Site value as a pure function of (dist, seed, x).
double site_value(const AlphaDistribution& dist, std::uint64_t seed, std::int64_t x);

/// A window of site probabilities ω(lo), ..., ω(lo + len − 1).
///
/// Sampled environments remember their law and seed; reads outside the
/// stored window fall back to site_value, so the environment extends lazily
/// and consistently. Explicit environments have no law and throw
/// WindowTooSmall when read outside their window.
class Environment {
public:
    static Environment sample(const AlphaDistribution& dist, std::int64_t lo, std::size_t len,
                              std::uint64_t seed);
    /// Lazy environment with an empty stored window.
    static Environment lazy(const AlphaDistribution& dist, std::uint64_t seed);
    static Environment explicit_values(std::int64_t lo, std::vector<double> values);

    double operator()(std::int64_t x) const;

    std::int64_t lo() const noexcept { return lo_; }
    /// One past the last stored site.
    std::int64_t end() const noexcept { return lo_ + static_cast<std::int64_t>(values_.size()); }
    std::span<const double> values() const noexcept { return values_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& dist_id() const noexcept { return dist_id_; }
    const std::optional<AlphaDistribution>& distribution() const noexcept { return dist_; }

    /// True if every site in [a, b] is stored (a > b is the empty range).
    bool covers(std::int64_t a, std::int64_t b) const noexcept
    {
        return a > b || (a >= lo_ && b < end());
    }

    /// Copies ω over [a, b] into a dense array, extending lazily if allowed.
    std::vector<double> slice(std::int64_t a, std::int64_t b) const;

    /// CSV dump: `# lo=..,len=..,seed=..,dist_id=..` header, then `site,omega` rows.
    void write_csv(std::ostream& out) const;

private:
    Environment() = default;

    std::int64_t lo_ = 0;
    std::vector<double> values_;
    std::uint64_t seed_ = 0;
    std::string dist_id_ = "explicit";
    std::optional<AlphaDistribution> dist_;
};

/// Strictly increasing τ with τ(0) = 0 and increments T_k ≥ 1, k ≥ 1.
class CoolingMap {
public:
    enum class Kind { polynomial, exponential, explicit_list, constant };

    static CoolingMap polynomial(double a);
    static CoolingMap exponential(double b);
    static CoolingMap explicit_increments(std::vector<std::uint64_t> increments);
    static CoolingMap constant(std::uint64_t period);

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return parameter_; }
    const std::vector<std::uint64_t>& listed() const noexcept { return listed_; }

    /// False for the constant map, which does not satisfy T_k → ∞.
    bool cooling() const noexcept { return kind_ != Kind::constant; }

    /// T_k for k ≥ 1.
    std::uint64_t increment(std::uint64_t k) const;
    /// τ(k) = T_1 + ... + T_k.
    std::uint64_t tau(std::uint64_t k) const;

    struct Location {
        std::uint64_t ell;   // ℓ(n) = inf{k : τ(k) > n}
        std::uint64_t bar_t; // n − τ(ℓ − 1)
    };
    Location locate(std::uint64_t n) const;

    /// Interval lengths (T_1, ..., T_{ℓ−1}, T̄ⁿ) covering [0, n); the last
    /// entry is the boundary piece and may be 0.
    std::vector<std::uint64_t> pieces(std::uint64_t n) const;

    std::string describe() const;

    friend bool operator==(const CoolingMap&, const CoolingMap&) = default;

private:
    CoolingMap(Kind kind, double parameter, std::vector<std::uint64_t> listed);

    Kind kind_;
    double parameter_;
    std::vector<std::uint64_t> listed_;
};

std::string_view kind_name(CoolingMap::Kind kind);

} // namespace coolwalk
