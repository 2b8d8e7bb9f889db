#pragma once

#include "lwp/random.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lwp {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Where a lifetime law puts its mass: isolated atoms plus continuous pieces.
struct SupportDescriptor {
    std::vector<double> atoms;                 // distinct, sorted, >= 0
    std::vector<Interval> continuous_intervals;

    [[nodiscard]] bool empty() const { return atoms.empty() && continuous_intervals.empty(); }
};

/// Merged support of several laws (atoms deduplicated, intervals kept as given).
SupportDescriptor merge_supports(std::span<const SupportDescriptor> parts);

struct LatticeSpan {
    double offset = 0.0;  // a
    double span = 0.0;    // b
};

/// Relative tolerance used when testing atoms against a candidate span.
inline constexpr double kLatticeTolerance = 1e-9;
/// Spans finer than max_atom / kMaxLatticeMultiplier count as non-lattice.
inline constexpr double kMaxLatticeMultiplier = 1e6;

/// Span b of the arithmetic lattice bZ generated by the atoms, or nullopt when
/// the support has a continuous part or the atoms are not commensurable.
/// A single atom v yields (0, v).
std::optional<LatticeSpan> lattice_span(const SupportDescriptor& support);

enum class DistributionKind {
    Exponential,
    Uniform,
    Gamma,
    Deterministic,
    Discrete,
    Empirical,
    Mixture,
    Residual,
};

/// An immutable lifetime law on [0, inf). Cheap to copy (shared state).
///
/// Every constructible law satisfies F(0+) = 0; the only exception is the
/// point mass at zero returned by residual() when the conditioning age lies
/// beyond the support.
class Distribution {
public:
    static Distribution exponential(double rate);
    static Distribution uniform(double lo, double hi);
    static Distribution gamma(double shape, double scale);
    static Distribution deterministic(double value);
    static Distribution discrete(std::vector<std::pair<double, double>> points);
    static Distribution empirical(std::vector<double> samples);
    static Distribution mixture(std::vector<double> weights, std::vector<Distribution> components);

    [[nodiscard]] DistributionKind kind() const;
    [[nodiscard]] std::string describe() const;

    [[nodiscard]] double cdf(double s) const;
    [[nodiscard]] double survival(double s) const;

    /// Integral of the survival function over [a, inf). Throws InfiniteMean.
    [[nodiscard]] double tail_integral(double a) const;

    /// k-th raw moment, +inf when it diverges.
    [[nodiscard]] double moment(int k) const;
    /// E exp(alpha * X), +inf when it diverges.
    [[nodiscard]] double exp_moment(double alpha) const;

    [[nodiscard]] double mean() const;
    [[nodiscard]] double second_moment() const;

    /// Law of X - a given X > a. For a <= 0 returns *this; when F(a) = 1 returns
    /// the point mass at zero (the residual stay is over immediately).
    [[nodiscard]] Distribution residual(double a) const;

    [[nodiscard]] double sample(Rng& rng) const;
    [[nodiscard]] SupportDescriptor support() const;

    [[nodiscard]] bool is_point_mass_at_zero() const;

    struct State;

private:
    explicit Distribution(std::shared_ptr<const State> state) : state_(std::move(state)) {}
    static Distribution point_mass_at_zero();

    std::shared_ptr<const State> state_;
};

/// True iff the union of the supports is not contained in any lattice bZ.
bool common_support_nonlattice(std::span<const Distribution> laws);

/// Upper-minus-lower Darboux sum of f on a uniform mesh of width delta over
/// [0, t_max], with sup/inf estimated from 32 samples per cell. Shrinking gaps
/// as delta decreases indicate direct Riemann integrability.
double dri_gap(const std::function<double(double)>& f, double delta, double t_max);

}  // namespace lwp
