#include "lwp/linearwise.hpp"

#include "lwp/error.hpp"
#include "lwp/renewal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace lwp {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

}  // namespace

// -------------------------------------------------------------------------
// Embedded chain

EmbeddedChain::EmbeddedChain(std::vector<int> states, std::vector<std::vector<double>> matrix)
    : states_(std::move(states)), matrix_(std::move(matrix)) {
    const std::size_t n = states_.size();
    if (n == 0) throw Error(ErrorCode::ValidationError, "chain needs at least one state");
    {
        std::vector<int> sorted = states_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw Error(ErrorCode::ValidationError, "duplicate state labels");
    }
    if (matrix_.size() != n) throw Error(ErrorCode::ValidationError, "matrix needs one row per state");
    for (std::size_t i = 0; i < n; ++i) {
        if (matrix_[i].size() != n)
            throw Error(ErrorCode::ValidationError, "row " + std::to_string(i) + " has " +
                                                        std::to_string(matrix_[i].size()) + " entries, expected " +
                                                        std::to_string(n));
        double sum = 0.0;
        for (double p : matrix_[i]) {
            if (!(p >= 0.0 && p <= 1.0))
                throw Error(ErrorCode::ValidationError,
                            "row " + std::to_string(i) + " has entry " + num(p) + " outside [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw Error(ErrorCode::ValidationError, "row " + std::to_string(i) + " sums to " + num(sum));
    }

    cumulative_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cumulative_[i].resize(n);
        std::partial_sum(matrix_[i].begin(), matrix_[i].end(), cumulative_[i].begin());
    }

    // reach[i][j]: j reachable from i in zero or more steps.
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> stack{s};
        reach[s][s] = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                if (matrix_[u][v] > 0.0 && !reach[s][v]) {
                    reach[s][v] = 1;
                    stack.push_back(v);
                }
            }
        }
    }
    // A state is in a closed class iff everything it reaches reaches it back.
    std::vector<char> assigned(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (assigned[i]) continue;
        bool closed = true;
        for (std::size_t j = 0; j < n && closed; ++j)
            if (reach[i][j] && !reach[j][i]) closed = false;
        if (!closed) continue;
        std::vector<std::size_t> cls;
        for (std::size_t j = 0; j < n; ++j)
            if (reach[i][j]) {
                cls.push_back(j);
                assigned[j] = 1;
            }
        closed_.push_back(std::move(cls));
    }
}

std::size_t EmbeddedChain::index_of(int state) const {
    const auto it = std::find(states_.begin(), states_.end(), state);
    if (it == states_.end()) throw Error(ErrorCode::UnknownState, "state " + std::to_string(state) + " is not in the chain");
    return static_cast<std::size_t>(it - states_.begin());
}

bool EmbeddedChain::contains(int state) const {
    return std::find(states_.begin(), states_.end(), state) != states_.end();
}

bool EmbeddedChain::in_closed_class(std::size_t index) const {
    for (const auto& cls : closed_)
        if (std::binary_search(cls.begin(), cls.end(), index)) return true;
    return false;
}

std::size_t EmbeddedChain::step(std::size_t from, Rng& rng) const {
    const auto& cum = cumulative_[from];
    const double u = uniform_open(rng) * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    return static_cast<std::size_t>(it - cum.begin());
}

std::vector<double> chain_frequencies(const EmbeddedChain& chain) {
    const auto& classes = chain.closed_classes();
    if (classes.size() != 1)
        throw Error(ErrorCode::MultipleClosedClasses,
                    "chain has " + std::to_string(classes.size()) + " closed classes; long-run frequencies depend on the start");
    const auto& cls = classes.front();
    const auto c = static_cast<Eigen::Index>(cls.size());

    // pi (P_C - I) = 0 with the last equation replaced by sum(pi) = 1.
    Eigen::MatrixXd a(c, c);
    for (Eigen::Index r = 0; r < c; ++r)
        for (Eigen::Index s = 0; s < c; ++s)
            a(r, s) = chain.probability(cls[static_cast<std::size_t>(s)], cls[static_cast<std::size_t>(r)]) -
                      (r == s ? 1.0 : 0.0);
    a.row(c - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(c);
    rhs(c - 1) = 1.0;
    const Eigen::VectorXd pi = a.fullPivLu().solve(rhs);

    std::vector<double> freq(chain.size(), 0.0);
    double total = 0.0;
    for (Eigen::Index r = 0; r < c; ++r) {
        const double v = std::max(pi(r), 0.0);
        freq[cls[static_cast<std::size_t>(r)]] = v;
        total += v;
    }
    for (double& v : freq) v /= total;
    return freq;
}

// -------------------------------------------------------------------------
// Process and simulation

LinearwiseProcess::LinearwiseProcess(EmbeddedChain chain, std::vector<Distribution> level_laws, int initial_state,
                                     double initial_age)
    : chain_(std::move(chain)),
      laws_(std::move(level_laws)),
      initial_index_(chain_.index_of(initial_state)),
      initial_age_(initial_age),
      first_sojourn_(laws_.empty() ? Distribution::deterministic(1.0) : laws_.front()) {
    if (laws_.size() != chain_.size())
        throw Error(ErrorCode::InvalidArgument, "need one level law per chain state (" + std::to_string(chain_.size()) +
                                                    "), got " + std::to_string(laws_.size()));
    for (std::size_t i = 0; i < laws_.size(); ++i) {
        if (laws_[i].is_point_mass_at_zero() || laws_[i].cdf(0.0) > 0.0)
            throw Error(ErrorCode::AtomAtZero,
                        "level " + std::to_string(chain_.states()[i]) + " law has mass at 0");
    }
    if (!(initial_age >= 0.0) || !std::isfinite(initial_age))
        throw Error(ErrorCode::InvalidArgument, "initial age must be finite and >= 0");
    first_sojourn_ = laws_[initial_index_].residual(initial_age_);
}

LinearwiseProcess LinearwiseProcess::restarted(int state, double age) const {
    return LinearwiseProcess(chain_, laws_, state, age);
}

Trajectory simulate(const LinearwiseProcess& process, double horizon, Rng& rng) {
    if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    const auto& chain = process.chain();
    Trajectory traj;
    traj.initial_state = process.initial_state();
    traj.initial_age = process.initial_age();
    traj.horizon = horizon;

    std::size_t level = process.initial_index();
    traj.level_indices.push_back(level);
    double t = process.first_sojourn().sample(rng);
    for (;;) {
        traj.jump_times.push_back(t);
        level = chain.step(level, rng);
        traj.level_indices.push_back(level);
        if (t > horizon) break;
        t += process.level_laws()[level].sample(rng);
    }
    traj.level_labels.reserve(traj.level_indices.size());
    for (std::size_t idx : traj.level_indices) traj.level_labels.push_back(chain.states()[idx]);
    return traj;
}

StateObservation observe_state(const Trajectory& trajectory, double t) {
    const auto& jumps = trajectory.jump_times;
    const auto it = std::upper_bound(jumps.begin(), jumps.end(), t + kJumpTieTolerance);
    if (it == jumps.end())
        throw Error(ErrorCode::OutOfRange, "t=" + num(t) + " lies past the simulated trajectory");
    const auto k = static_cast<std::size_t>(it - jumps.begin());
    const double x = k == 0 ? t + trajectory.initial_age : std::max(t - jumps[k - 1], 0.0);
    return {trajectory.level_labels[k], x, *it - t};
}

// -------------------------------------------------------------------------
// Stationary law

StationaryLaw::StationaryLaw(std::vector<int> states, std::vector<double> frequencies,
                             std::vector<Distribution> level_laws)
    : states_(std::move(states)), frequencies_(std::move(frequencies)), laws_(std::move(level_laws)) {
    for (std::size_t i = 0; i < states_.size(); ++i)
        if (frequencies_[i] > 0.0) weight_ += frequencies_[i] * laws_[i].mean();
}

std::size_t StationaryLaw::index_of(int state) const {
    const auto it = std::find(states_.begin(), states_.end(), state);
    if (it == states_.end()) throw Error(ErrorCode::UnknownState, "state " + std::to_string(state) + " is not in the chain");
    return static_cast<std::size_t>(it - states_.begin());
}

double StationaryLaw::query(int state, double a, double b) const {
    const std::size_t i = index_of(state);
    if (frequencies_[i] == 0.0) return 0.0;
    return frequencies_[i] / weight_ * laws_[i].tail_integral(std::max(a, 0.0) + std::max(b, 0.0));
}

double StationaryLaw::level_probability(int state) const {
    const std::size_t i = index_of(state);
    if (frequencies_[i] == 0.0) return 0.0;
    return frequencies_[i] * laws_[i].mean() / weight_;
}

double StationaryLaw::mean_cycle_length(int state) const {
    const std::size_t i = index_of(state);
    if (frequencies_[i] == 0.0)
        throw Error(ErrorCode::TransientState, "state " + std::to_string(state) + " is not essential");
    return weight_ / frequencies_[i];
}

StationaryLaw stationary_law(const EmbeddedChain& chain, const std::vector<Distribution>& level_laws) {
    if (level_laws.size() != chain.size())
        throw Error(ErrorCode::InvalidArgument, "need one level law per chain state");
    std::vector<double> freq = chain_frequencies(chain);

    std::vector<Distribution> essential;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (!std::isfinite(level_laws[i].mean()))
            throw Error(ErrorCode::InfiniteMean, "level " + std::to_string(chain.states()[i]) + " has no finite mean");
        if (freq[i] > 0.0) essential.push_back(level_laws[i]);
    }
    if (!common_support_nonlattice(essential))
        throw Error(ErrorCode::LatticeSupport, "the essential levels' sojourn supports lie on a common lattice");
    return StationaryLaw(chain.states(), std::move(freq), level_laws);
}

// -------------------------------------------------------------------------
// Monte Carlo

EmpiricalLaw::EmpiricalLaw(double t_obs, std::vector<StateObservation> observations)
    : t_obs_(t_obs), obs_(std::move(observations)) {}

ProportionEstimate EmpiricalLaw::probability(int state, double a, double b, double z) const {
    std::size_t hits = 0;
    for (const auto& o : obs_)
        if (o.level == state && o.x > a && o.x_star > b) ++hits;
    const double n = static_cast<double>(obs_.size());
    const double p = obs_.empty() ? 0.0 : static_cast<double>(hits) / n;
    return {p, obs_.empty() ? 0.0 : z * std::sqrt(p * (1.0 - p) / n)};
}

double EmpiricalLaw::overjump_survival(double s) const {
    if (obs_.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& o : obs_)
        if (o.x_star > s) ++hits;
    return static_cast<double>(hits) / static_cast<double>(obs_.size());
}

EmpiricalLaw estimate_law(const LinearwiseProcess& process, double t_obs, std::size_t replicas,
                          const RunConfig& config) {
    if (!(t_obs >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t_obs must be nonnegative");
    if (replicas == 0) throw Error(ErrorCode::InvalidArgument, "replicas must be positive");
    std::vector<StateObservation> obs(replicas);
    const double horizon = std::max(t_obs, 1e-12);
    for_each_replica(replicas, config, [&](std::size_t i, Rng& rng) {
        obs[i] = observe_state(simulate(process, horizon, rng), t_obs);
    });
    return EmpiricalLaw(t_obs, std::move(obs));
}

double first_hit_time(const LinearwiseProcess& process, int state, Rng& rng) {
    const auto& chain = process.chain();
    const std::size_t target = chain.index_of(state);
    if (!chain.in_closed_class(target))
        throw Error(ErrorCode::TransientState, "state " + std::to_string(state) + " is not essential");
    std::size_t level = process.initial_index();
    double t = process.first_sojourn().sample(rng);
    for (std::size_t jumps = 0; jumps < kMaxHitJumps; ++jumps) {
        level = chain.step(level, rng);
        if (level == target) return t;
        t += process.level_laws()[level].sample(rng);
    }
    throw Error(ErrorCode::NoHit, "state (" + std::to_string(state) + ", 0) not reached within " +
                                      std::to_string(kMaxHitJumps) + " jumps");
}

std::vector<double> regeneration_cycles(const LinearwiseProcess& process, int state, std::size_t count, Rng& rng) {
    const auto& chain = process.chain();
    const std::size_t target = chain.index_of(state);
    double last_entry = first_hit_time(process, state, rng);
    std::vector<double> spacings;
    spacings.reserve(count);
    std::size_t level = target;
    double t = last_entry;
    std::size_t jumps_since_entry = 0;
    while (spacings.size() < count) {
        t += process.level_laws()[level].sample(rng);
        level = chain.step(level, rng);
        if (level == target) {
            spacings.push_back(t - last_entry);
            last_entry = t;
            jumps_since_entry = 0;
        } else if (++jumps_since_entry >= kMaxHitJumps) {
            throw Error(ErrorCode::NoHit, "no return to state (" + std::to_string(state) + ", 0)");
        }
    }
    return spacings;
}

}  // namespace lwp
