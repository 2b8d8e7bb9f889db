#pragma once

#include "lwp/dist.hpp"
#include "lwp/parallel.hpp"
#include "lwp/random.hpp"

#include <cstddef>
#include <vector>

namespace lwp {

/// Finite row-stochastic transition matrix over integer-labelled states.
class EmbeddedChain {
public:
    /// Throws ValidationError when a row does not sum to 1 within 1e-12 or an
    /// entry leaves [0, 1].
    EmbeddedChain(std::vector<int> states, std::vector<std::vector<double>> matrix);

    [[nodiscard]] std::size_t size() const { return states_.size(); }
    [[nodiscard]] const std::vector<int>& states() const { return states_; }
    [[nodiscard]] const std::vector<std::vector<double>>& matrix() const { return matrix_; }
    [[nodiscard]] double probability(std::size_t from, std::size_t to) const { return matrix_[from][to]; }

    /// Index of a state label; throws UnknownState.
    [[nodiscard]] std::size_t index_of(int state) const;
    [[nodiscard]] bool contains(int state) const;

    /// Communicating classes that no transition leaves, each sorted by index.
    [[nodiscard]] const std::vector<std::vector<std::size_t>>& closed_classes() const { return closed_; }
    [[nodiscard]] bool in_closed_class(std::size_t index) const;

    /// One transition from `from`.
    [[nodiscard]] std::size_t step(std::size_t from, Rng& rng) const;

private:
    std::vector<int> states_;
    std::vector<std::vector<double>> matrix_;
    std::vector<std::vector<double>> cumulative_;
    std::vector<std::vector<std::size_t>> closed_;
};

inline constexpr double kRowSumTolerance = 1e-12;

/// Long-run visit frequencies p_i, indexed like chain.states(): the stationary
/// vector of the unique closed class, zero on transient states. Periodic
/// classes are fine. Throws MultipleClosedClasses.
std::vector<double> chain_frequencies(const EmbeddedChain& chain);

/// (n_t, x_t) driven by the chain, with sojourn law level_laws[i] in state i.
class LinearwiseProcess {
public:
    /// level_laws is indexed like chain.states(). Throws AtomAtZero,
    /// UnknownState, or InvalidArgument.
    LinearwiseProcess(EmbeddedChain chain, std::vector<Distribution> level_laws, int initial_state,
                      double initial_age = 0.0);

    [[nodiscard]] const EmbeddedChain& chain() const { return chain_; }
    [[nodiscard]] const std::vector<Distribution>& level_laws() const { return laws_; }
    [[nodiscard]] int initial_state() const { return chain_.states()[initial_index_]; }
    [[nodiscard]] std::size_t initial_index() const { return initial_index_; }
    [[nodiscard]] double initial_age() const { return initial_age_; }

    /// Law of the first sojourn: the level law conditioned on the age x0.
    [[nodiscard]] const Distribution& first_sojourn() const { return first_sojourn_; }

    /// Same dynamics, different starting point.
    [[nodiscard]] LinearwiseProcess restarted(int state, double age) const;

private:
    EmbeddedChain chain_;
    std::vector<Distribution> laws_;
    std::size_t initial_index_;
    double initial_age_;
    Distribution first_sojourn_;
};

/// Jump skeleton of one path: level_indices[0] holds on [0, t_1) and
/// level_indices[k] is the level entered at jump_times[k-1]. The last jump lies
/// past the horizon.
struct Trajectory {
    std::vector<double> jump_times;
    std::vector<std::size_t> level_indices;
    std::vector<int> level_labels;
    int initial_state = 0;
    double initial_age = 0.0;
    double horizon = 0.0;
};

Trajectory simulate(const LinearwiseProcess& process, double horizon, Rng& rng);

struct StateObservation {
    int level = 0;
    double x = 0.0;       // time since the last jump (t + x0 before the first)
    double x_star = 0.0;  // time to the next jump
};

/// Jumps within kJumpTieTolerance of t count as already happened.
StateObservation observe_state(const Trajectory& trajectory, double t);

/// Limit law P{n = i, x > a, x* > b} = (p_i / T) * int_{a+b}^inf S_i(u) du.
class StationaryLaw {
public:
    StationaryLaw(std::vector<int> states, std::vector<double> frequencies, std::vector<Distribution> level_laws);

    [[nodiscard]] const std::vector<int>& states() const { return states_; }
    [[nodiscard]] const std::vector<double>& frequencies() const { return frequencies_; }
    [[nodiscard]] const std::vector<Distribution>& level_laws() const { return laws_; }
    /// T = sum_i p_i T_i.
    [[nodiscard]] double mean_weight() const { return weight_; }

    [[nodiscard]] double query(int state, double a, double b) const;
    /// p_k T_k / T.
    [[nodiscard]] double level_probability(int state) const;
    /// Mean time between entries into (k, 0), T / p_k. Throws TransientState.
    [[nodiscard]] double mean_cycle_length(int state) const;

private:
    [[nodiscard]] std::size_t index_of(int state) const;

    std::vector<int> states_;
    std::vector<double> frequencies_;
    std::vector<Distribution> laws_;
    double weight_ = 0.0;
};

/// Checks the ergodicity conditions and builds the limit law. Throws
/// MultipleClosedClasses, InfiniteMean, or LatticeSupport (the union of the
/// essential levels' supports lies on a lattice).
StationaryLaw stationary_law(const EmbeddedChain& chain, const std::vector<Distribution>& level_laws);

struct ProportionEstimate {
    double estimate = 0.0;
    double half_width = 0.0;
};

/// (n, x, x*) observed at one time over independent replicas.
class EmpiricalLaw {
public:
    EmpiricalLaw(double t_obs, std::vector<StateObservation> observations);

    [[nodiscard]] double t_obs() const { return t_obs_; }
    [[nodiscard]] std::size_t replicas() const { return obs_.size(); }
    [[nodiscard]] const std::vector<StateObservation>& observations() const { return obs_; }

    /// Fraction of replicas with n = state, x > a, x* > b and its normal
    /// half-width at critical value z.
    [[nodiscard]] ProportionEstimate probability(int state, double a, double b, double z) const;

    /// Fraction with x* > s regardless of level.
    [[nodiscard]] double overjump_survival(double s) const;

private:
    double t_obs_;
    std::vector<StateObservation> obs_;
};

EmpiricalLaw estimate_law(const LinearwiseProcess& process, double t_obs, std::size_t replicas,
                          const RunConfig& config);

inline constexpr std::size_t kMaxHitJumps = 1'000'000;

/// First t > 0 with X_t = (k, 0). Throws TransientState when k is not in a
/// closed class and NoHit after kMaxHitJumps jumps.
double first_hit_time(const LinearwiseProcess& process, int state, Rng& rng);

/// Spacings between `count + 1` consecutive entries into (k, 0) along one path.
std::vector<double> regeneration_cycles(const LinearwiseProcess& process, int state, std::size_t count, Rng& rng);

}  // namespace lwp
