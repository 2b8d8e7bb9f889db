#include "lwp/bounds.hpp"

#include "lwp/error.hpp"
#include "lwp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lwp {

namespace {

void check_times(std::span<const double> times) {
    if (times.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one observation time");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "observation times must be nonnegative");
        if (i > 0 && times[i] < times[i - 1])
            throw Error(ErrorCode::InvalidArgument, "observation times must be ascending");
    }
}

double stationary_mean_or_throw(const Distribution& cycle) {
    const double m2 = cycle.moment(2);
    if (!std::isfinite(m2))
        throw Error(ErrorCode::InfiniteSecondMoment, cycle.describe() + " has no finite second moment");
    return m2 / (2.0 * cycle.mean());
}

/// values[i * times + j] = f(observation of replica i at times[j]).
template <class F>
std::vector<double> renewal_functional(const Distribution& cycle, std::span<const double> times,
                                       std::size_t replicas, const RunConfig& config, F&& f) {
    if (replicas == 0) throw Error(ErrorCode::InvalidArgument, "replicas must be positive");
    const std::size_t m = times.size();
    std::vector<double> values(replicas * m);
    for_each_replica(replicas, config, [&](std::size_t i, Rng& rng) {
        std::vector<OverUnder> obs(m);
        sample_over_under(cycle, times, rng, obs);
        for (std::size_t j = 0; j < m; ++j) values[i * m + j] = f(obs[j]);
    });
    return values;
}

std::vector<MeanEstimate> column_means(const std::vector<double>& values, std::size_t columns) {
    const std::size_t rows = values.size() / columns;
    std::vector<MeanEstimate> out;
    std::vector<double> col(rows);
    for (std::size_t j = 0; j < columns; ++j) {
        for (std::size_t i = 0; i < rows; ++i) col[i] = values[i * columns + j];
        out.push_back(estimate_mean(col));
    }
    return out;
}

template <class F>
MeanCurve mean_curve(const Distribution& cycle, std::span<const double> times, std::size_t replicas,
                     const RunConfig& config, F&& f) {
    check_times(times);
    MeanCurve curve;
    curve.limit = stationary_mean_or_throw(cycle);
    const auto values = renewal_functional(cycle, times, replicas, config, f);
    const auto means = column_means(values, times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        const auto& e = means[j];
        curve.points.push_back({times[j], e.mean, e.half_width(kThreeSigma)});
        if (e.mean - e.half_width(kThreeSigma) > curve.limit) curve.bound_violation = true;
        if (j > 0) {
            const auto& prev = means[j - 1];
            const double se = std::hypot(prev.std_error, e.std_error);
            if (prev.mean - e.mean > kThreeSigma * se) curve.monotonicity_violation = true;
        }
    }
    return curve;
}

}  // namespace

MeanCurve overjump_mean_curve(const Distribution& cycle, std::span<const double> times, std::size_t replicas,
                              const RunConfig& config) {
    return mean_curve(cycle, times, replicas, config, [](const OverUnder& o) { return o.x_star; });
}

MeanCurve underjump_mean_curve(const Distribution& cycle, std::span<const double> times, std::size_t replicas,
                               const RunConfig& config) {
    return mean_curve(cycle, times, replicas, config, [](const OverUnder& o) { return o.x; });
}

double monotonicity_gap(const Distribution& cycle, const RenewalFunctionTable& table, double s, double t,
                        double delta) {
    if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be nonnegative");
    if (t + delta > table.t_max() * (1.0 + 1e-12))
        throw Error(ErrorCode::OutOfRange, "t + delta exceeds the renewal table range");
    return overjump_survival_exact(cycle, table, s, t + delta) - overjump_survival_exact(cycle, table, s, t);
}

double power_moment_bound(const Distribution& cycle, int k) {
    if (k < 3) throw Error(ErrorCode::InvalidArgument, "power moment bound needs k >= 3");
    const double mk = cycle.moment(k);
    if (!std::isfinite(mk))
        throw Error(ErrorCode::InfiniteMoment, cycle.describe() + " has no finite moment of order " + std::to_string(k));
    return mk / (static_cast<double>(k) * cycle.mean());
}

double exp_moment_bound(const Distribution& cycle, double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
    const double m = cycle.exp_moment(alpha);
    if (!std::isfinite(m))
        throw Error(ErrorCode::DivergentExponentialMoment, "E exp(alpha X) diverges for " + cycle.describe());
    return m / (alpha * cycle.mean()) - 1.0;
}

BoundReport make_bound_report(std::string name, double bound, std::vector<BoundObservation> observed) {
    BoundReport r;
    r.name = std::move(name);
    r.bound_value = bound;
    r.observed = std::move(observed);
    r.satisfied = true;
    double worst_upper = -std::numeric_limits<double>::infinity();
    for (const auto& o : r.observed) {
        if (o.estimate - o.half_width > bound) r.satisfied = false;
        worst_upper = std::max(worst_upper, o.estimate + o.half_width);
    }
    r.slack = r.observed.empty() ? 0.0 : bound - worst_upper;
    return r;
}

BoundReport curve_bound_report(std::string name, const MeanCurve& curve) {
    std::vector<BoundObservation> obs;
    for (const auto& p : curve.points) obs.push_back({"mean", p.t, p.estimate, p.half_width});
    BoundReport r = make_bound_report(std::move(name), curve.limit, std::move(obs));
    r.satisfied = r.satisfied && !curve.monotonicity_violation;
    return r;
}

BoundReport verify_power_moment(const Distribution& cycle, int k, std::span<const double> times,
                                std::size_t replicas, const RunConfig& config) {
    check_times(times);
    const double bound = power_moment_bound(cycle, k);
    const double power = static_cast<double>(k - 1);
    const auto values = renewal_functional(cycle, times, replicas, config,
                                           [power](const OverUnder& o) { return std::pow(o.x_star, power); });
    const auto means = column_means(values, times.size());
    std::vector<BoundObservation> obs;
    for (std::size_t j = 0; j < times.size(); ++j)
        obs.push_back({"E x*^" + std::to_string(k - 1), times[j], means[j].mean, means[j].half_width(kThreeSigma)});
    return make_bound_report("power_moment_k" + std::to_string(k), bound, std::move(obs));
}

BoundReport verify_exp_moment(const Distribution& cycle, double alpha, std::span<const double> times,
                              std::size_t replicas, const RunConfig& config) {
    check_times(times);
    const double bound = exp_moment_bound(cycle, alpha);
    const auto values = renewal_functional(cycle, times, replicas, config,
                                           [alpha](const OverUnder& o) { return std::exp(alpha * o.x_star); });
    const auto means = column_means(values, times.size());
    std::vector<BoundObservation> obs;
    for (std::size_t j = 0; j < times.size(); ++j)
        obs.push_back({"E exp(alpha x*)", times[j], means[j].mean, means[j].half_width(kThreeSigma)});
    return make_bound_report("exp_moment", bound, std::move(obs));
}

BoundReport conditional_bound_check(const LinearwiseProcess& process, int state, double tau,
                                    std::size_t replicas, const RunConfig& config) {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    if (replicas == 0) throw Error(ErrorCode::InvalidArgument, "replicas must be positive");
    const std::size_t target = process.chain().index_of(state);
    const Distribution& law = process.level_laws()[target];
    const double bound = stationary_mean_or_throw(law);
    const bool starts_regenerated = process.initial_index() == target && process.initial_age() == 0.0;

    struct Sample {
        bool used = false;
        double x = 0.0;
        double x_star = 0.0;
    };
    std::vector<Sample> samples(replicas);
    for_each_replica(replicas, config, [&](std::size_t i, Rng& rng) {
        const Trajectory traj = simulate(process, tau, rng);
        bool regenerated = starts_regenerated;
        for (std::size_t j = 0; j < traj.jump_times.size() && !regenerated; ++j) {
            if (traj.jump_times[j] >= tau) break;
            if (traj.level_indices[j + 1] == target) regenerated = true;
        }
        if (!regenerated) return;
        const StateObservation o = observe_state(traj, tau);
        if (o.level != state) return;
        samples[i] = {true, o.x, o.x_star};
    });

    std::vector<double> xs;
    std::vector<double> stars;
    for (const auto& s : samples) {
        if (!s.used) continue;
        xs.push_back(s.x);
        stars.push_back(s.x_star);
    }
    if (xs.empty())
        throw Error(ErrorCode::NoSamples, "no replica was in level " + std::to_string(state) +
                                              " at tau after entering (" + std::to_string(state) + ", 0)");
    const MeanEstimate ex = estimate_mean(xs);
    const MeanEstimate es = estimate_mean(stars);
    return make_bound_report("conditional_mean_bound", bound,
                             {{"E(x|n=k)", tau, ex.mean, ex.half_width(kThreeSigma)},
                              {"E(x*|n=k)", tau, es.mean, es.half_width(kThreeSigma)}});
}

}  // namespace lwp
