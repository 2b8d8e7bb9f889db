#pragma once

#include "lwp/dist.hpp"
#include "lwp/random.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace lwp {

/// One realisation of a (possibly delayed) renewal process. The first jump past
/// the horizon is kept so the overjump is observable at every t <= horizon.
struct RenewalTrajectory {
    std::vector<double> jump_times;
    double horizon = 0.0;
    std::optional<Distribution> first_delay;
    Distribution cycle = Distribution::exponential(1.0);
};

RenewalTrajectory simulate_renewal(const std::optional<Distribution>& first_delay, const Distribution& cycle,
                                   double horizon, Rng& rng);

/// Underjump x (time since the last renewal, or since 0) and overjump x* (time
/// to the next renewal).
struct OverUnder {
    double x = 0.0;
    double x_star = 0.0;
};

/// Jump times within this distance of t are treated as already happened.
inline constexpr double kJumpTieTolerance = 1e-12;

OverUnder observe_over_under(const RenewalTrajectory& trajectory, double t);

/// Simulates one zero-delay path just far enough to observe (x, x*) at each of
/// the ascending `times`; nothing is stored.
void sample_over_under(const Distribution& cycle, std::span<const double> times, Rng& rng,
                       std::span<OverUnder> out);

/// Grid values H(j h), j = 0..J, of the renewal function sum_m F^{m*}.
///
/// Powers are generated by a midpoint Riemann–Stieltjes convolution (each
/// cell's mass of F meets the average of the previous power at the two cell
/// edges) and summed until the next power stays below 1e-12 on the grid.
class RenewalFunctionTable {
public:
    RenewalFunctionTable(Distribution cycle, double step, std::vector<double> values, int truncation_m);

    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] const Distribution& cycle_law() const { return cycle_; }
    [[nodiscard]] int truncation_m() const { return truncation_m_; }
    [[nodiscard]] double t_max() const { return step_ * static_cast<double>(values_.size() - 1); }

    /// Largest one-cell increment of H: the resolution of every grid
    /// Stieltjes integral against dH.
    [[nodiscard]] double discretization_bound() const { return discretization_bound_; }

    /// max_j |H(jh) - F(jh) - (F*H)(jh)| with the convolution taken at left
    /// cell edges.
    [[nodiscard]] double renewal_equation_residual() const;

    /// H at an arbitrary t in [0, t_max], linear between grid points.
    [[nodiscard]] double at(double t) const;

    /// sum over cells of [0, t] of g(midpoint) * (H(right) - H(left)).
    [[nodiscard]] double stieltjes(const std::function<double(double)>& g, double t) const;

private:
    Distribution cycle_;
    double step_;
    std::vector<double> values_;
    int truncation_m_;
    double discretization_bound_ = 0.0;
};

inline constexpr double kPowerCutoff = 1e-12;
inline constexpr int kMaxPowers = 1'000'000;

/// Builds the table on [0, t_max]; step <= 0 selects mean / 1000.
/// Throws BudgetExceeded when kMaxPowers powers do not reach the cutoff.
RenewalFunctionTable renewal_function(const Distribution& cycle, double t_max, double step = 0.0);

using Kernel = std::function<double(double)>;

/// Grid value of int_0^t b(t - s) dH(s). Throws OutOfRange past the table.
double key_renewal_integral(const Kernel& b, const RenewalFunctionTable& table, double t);

/// int_0^inf b(s) ds / mean. Throws LatticeCycle, InfiniteMean, or NonFinite
/// when the integral of b does not converge.
double key_renewal_limit(const Kernel& b, const Distribution& cycle);

struct ConvergencePoint {
    double t = 0.0;
    double integral = 0.0;
    double gap = 0.0;
};

/// key_renewal_integral at t = mean * 2^k (k = 0, 1, ...) up to the table end,
/// with the gap to `limit`.
std::vector<ConvergencePoint> key_renewal_convergence(const Kernel& b, const RenewalFunctionTable& table,
                                                      double limit);

/// P{x*_t > s} for the zero-delay process, from the grid renewal function.
double overjump_survival_exact(const Distribution& cycle, const RenewalFunctionTable& table, double s, double t);

/// A limit-law value together with a flag set when the cycle is lattice and
/// the limit statement therefore does not apply.
struct LimitValue {
    double value = 0.0;
    bool lattice_warning = false;
};

/// Stationary P{x* > a} = int_a^inf S / int_0^inf S. Throws InfiniteMean.
LimitValue stationary_overjump_survival(const Distribution& cycle, double a);

/// Stationary E x* = E X^2 / (2 E X). Throws InfiniteSecondMoment.
LimitValue stationary_overjump_mean(const Distribution& cycle);

bool is_lattice(const Distribution& law);

}  // namespace lwp
