#pragma once

#include "coolwalk/csv.hpp"
#include "coolwalk/env.hpp"
#include "coolwalk/parallel.hpp"
#include "coolwalk/walk.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace coolwalk {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Piecewise-linear function on a strictly increasing grid, values in ℝ ∪ {+∞}.
/// Finite values occupy one contiguous run of grid points.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::vector<double> xs, std::vector<double> ys, bool convex = false);

    std::span<const double> xs() const noexcept { return xs_; }
    std::span<const double> ys() const noexcept { return ys_; }
    std::size_t size() const noexcept { return xs_.size(); }
    bool finite(std::size_t i) const noexcept { return ys_[i] < infinity; }
    bool convex() const noexcept { return convex_; }

    /// [first, last] indices of the finite run, if any.
    std::optional<std::pair<std::size_t, std::size_t>> finite_range() const noexcept;

    /// Linear interpolation; +∞ outside the grid or next to an infinite node.
    double operator()(double x) const noexcept;

    /// Discrete convexity of the finite part: slopes non-decreasing within tol.
    bool check_convex(double tol = 1e-9) const noexcept;

    void write_csv(std::ostream& out, const Metadata& meta) const;

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
    bool convex_ = false;
};

// --- hitting-time continued fraction -------------------------------------

/// φ_x(λ) = E^ω_x[e^{λ τ_{x→x+1}}], the passage-time MGF across one bond.
struct CFState {
    double phi = 1.0;
    bool diverged = false;
};

/// φ_x = ω_x e^λ / (1 − (1 − ω_x) e^λ φ_{x−1}). First-step decomposition:
/// either step right, or step left, cross back (φ_{x−1}) and try again (φ_x).
/// A non-positive denominator means the passage-time MGF is infinite.
CFState hitting_cf_step(CFState prev, double omega_x, double lambda);

/// Smaller root of the homogeneous fixed point φ = p e^λ / (1 − (1−p) e^λ φ),
/// or nullopt when the discriminant is negative (MGF infinite).
std::optional<double> homogeneous_cf_fixed_point(double p, double lambda);

/// (1/n) log E^ω_0[e^{λ H_n}] by the continued-fraction sweep over sites
/// −warmup..n−1 of `env`, started at the homogeneous fixed point of the
/// leftmost site. Returns +∞ on divergence; exactly 0 at λ = 0.
double hitting_logmgf_rate(const Environment& env, std::uint64_t n, double lambda,
                           std::uint64_t warmup);

/// Same on a freshly sampled environment over sites −warmup..n−1.
double hitting_logmgf_rate(const AlphaDistribution& dist, std::uint64_t n, double lambda,
                           std::uint64_t warmup, std::uint64_t seed);

/// Batch kernel: hitting_logmgf_rate for every λ on one shared environment.
std::vector<double> hitting_logmgf_rates(const Environment& env, std::uint64_t n,
                                         std::span<const double> lambdas, std::uint64_t warmup,
                                         Exec exec = Exec::serial);

struct JStarCurve {
    GridFunction values;
    /// [last finite λ, first diverged λ] when divergence was seen on the grid.
    std::optional<std::pair<double, double>> critical;
    bool monotone = false;
};

JStarCurve jstar_curve(const AlphaDistribution& dist, std::span<const double> lambdas,
                       std::uint64_t n, std::uint64_t seed, std::uint64_t warmup,
                       Exec exec = Exec::serial);

// --- convex duality ------------------------------------------------------

/// g(y) = max_i [y x_i − f(x_i)] over finite nodes. Throws EmptyFinitePart.
GridFunction legendre(const GridFunction& f, std::span<const double> out_grid);

/// J̃ = J − ⟨log ρ⟩ on the finite part.
GridFunction jtilde(const GridFunction& J, double mean_log_rho);

/// I(x) = x J(1/x) on (0, 1], I(0) = 0, I(x) = (−x) J̃(1/(−x)) on [−1, 0),
/// +∞ outside [−1, 1]. J must be finite at every 1/|x| requested.
GridFunction rate_I_from_J(const GridFunction& J, double mean_log_rho,
                           std::span<const double> xs);

/// I*(λ) = sup_{x ∈ [−1,1]} [λx − I(x)].
GridFunction istar_from_I(const GridFunction& I, std::span<const double> lambdas);

// --- grids and the full chain ---------------------------------------------

struct GridSpec {
    double lo = -3.0;
    double hi = 3.0;
    std::size_t points = 401;
    /// Extra log-spaced nodes ±10^e, e ∈ [−6, log10(step)], on each side of 0.
    std::size_t refine_near_zero = 0;

    std::vector<double> build() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// The 1/|x| nodes needed by rate_I_from_J for an x grid, ascending.
std::vector<double> reciprocal_grid(std::span<const double> xs);

struct RateChain {
    JStarCurve jstar;
    GridFunction J;
    GridFunction I;
    GridFunction istar;
    double mean_log_rho = 0.0;
};

/// J* → J → (J̃) → I → I* for one environment sample.
RateChain compute_rate_chain(const AlphaDistribution& dist, std::span<const double> lambdas,
                             std::span<const double> xs, std::uint64_t n, std::uint64_t seed,
                             std::uint64_t warmup, Exec exec = Exec::serial);

// --- block rates -----------------------------------------------------------

struct BlockRate {
    double lo;
    double hi;
    bool lo_closed;
    double mass;
    double rate; // −(1/n) log mass, +∞ for empty blocks
};

/// Block masses of Z_n/n over the 2N blocks [−1, −1+1/N], (i/N, (i+1)/N];
/// when v > 0 the blocks meeting (0, v] are merged into (0, ⌊vN+1⌋/N].
std::vector<BlockRate> empirical_block_rate(const LatticePmf& pmf, std::uint64_t n,
                                            std::uint64_t blocks_per_side, double v = 0.0);

} // namespace coolwalk
