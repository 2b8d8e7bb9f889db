#pragma once

#include "lwp/dist.hpp"
#include "lwp/linearwise.hpp"
#include "lwp/parallel.hpp"
#include "lwp/renewal.hpp"

#include <span>
#include <string>
#include <vector>

namespace lwp {

struct CurvePoint {
    double t = 0.0;
    double estimate = 0.0;
    double half_width = 0.0;  // 3 sigma
};

/// Monte Carlo E x*_t (or E x_t) at ascending times against its stationary
/// limit E X^2 / (2 E X).
struct MeanCurve {
    std::vector<CurvePoint> points;
    double limit = 0.0;
    /// Some consecutive pair decreases by more than 3 combined standard errors.
    bool monotonicity_violation = false;
    /// Some lower band lies above the limit.
    bool bound_violation = false;
};

/// Throws InfiniteSecondMoment; times must be ascending.
MeanCurve overjump_mean_curve(const Distribution& cycle, std::span<const double> times, std::size_t replicas,
                              const RunConfig& config);
MeanCurve underjump_mean_curve(const Distribution& cycle, std::span<const double> times, std::size_t replicas,
                               const RunConfig& config);

/// R(s, t + delta) - R(s, t) from the grid renewal function.
double monotonicity_gap(const Distribution& cycle, const RenewalFunctionTable& table, double s, double t,
                        double delta);

/// E X^k / (k E X), the uniform bound on E (x*_t)^(k-1). Requires k >= 3;
/// throws InfiniteMoment.
double power_moment_bound(const Distribution& cycle, int k);

/// E e^(alpha X) / (alpha E X) - 1, the uniform bound on E e^(alpha x*_t).
/// Throws DivergentExponentialMoment.
double exp_moment_bound(const Distribution& cycle, double alpha);

struct BoundObservation {
    std::string label;
    double probe = 0.0;  // t or tau
    double estimate = 0.0;
    double half_width = 0.0;
};

struct BoundReport {
    std::string name;
    double bound_value = 0.0;
    std::vector<BoundObservation> observed;
    /// No estimate exceeds the bound by more than its half-width. A bound met
    /// with equality passes.
    bool satisfied = false;
    /// bound - max(estimate + half_width); negative when the bound is sharp.
    double slack = 0.0;
};

BoundReport make_bound_report(std::string name, double bound, std::vector<BoundObservation> observed);

/// Report for a mean curve: every point against the limit.
BoundReport curve_bound_report(std::string name, const MeanCurve& curve);

/// Monte Carlo E (x*_t)^(k-1) at each time against power_moment_bound.
BoundReport verify_power_moment(const Distribution& cycle, int k, std::span<const double> times,
                                std::size_t replicas, const RunConfig& config);

/// Monte Carlo E e^(alpha x*_t) at each time against exp_moment_bound.
BoundReport verify_exp_moment(const Distribution& cycle, double alpha, std::span<const double> times,
                              std::size_t replicas, const RunConfig& config);

/// E(x_tau | n_tau = k) and E(x*_tau | n_tau = k) over replicas that entered
/// (k, 0) before tau, against E X_k^2 / (2 E X_k). Throws NoSamples when no
/// replica qualifies and InfiniteSecondMoment.
BoundReport conditional_bound_check(const LinearwiseProcess& process, int state, double tau,
                                    std::size_t replicas, const RunConfig& config);

}  // namespace lwp
