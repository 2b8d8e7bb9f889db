#include "lwp/error.hpp"
#include "lwp/linearwise.hpp"
#include "lwp/stats.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using lwp::Distribution;
using lwp::EmbeddedChain;
using lwp::ErrorCode;
using Matrix = std::vector<std::vector<double>>;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const lwp::Error& e) {
        return e.code();
    }
    FAIL("expected an lwp::Error");
    return ErrorCode::InvalidArgument;
}

// Cesaro average of pi P^n from the uniform start: handles periodic chains.
std::vector<double> cesaro(const Matrix& p, int steps = 20000) {
    const std::size_t n = p.size();
    std::vector<double> pi(n, 1.0 / n), acc(n, 0.0);
    for (int s = 0; s < steps; ++s) {
        std::vector<double> next(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * p[i][j];
        pi = next;
        for (std::size_t j = 0; j < n; ++j) acc[j] += pi[j] / steps;
    }
    return acc;
}

EmbeddedChain alternating() { return EmbeddedChain({0, 1}, {{0.0, 1.0}, {1.0, 0.0}}); }

}  // namespace

TEST_CASE("chain validation") {
    try {
        EmbeddedChain({0, 1}, {{0.0, 1.0}, {0.5, 0.4}});
        FAIL("no error");
    } catch (const lwp::Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
        CHECK_THAT(e.what(), ContainsSubstring("row 1 sums to 0.9"));
    }
    CHECK(code_of([] { EmbeddedChain({0, 1}, {{1.2, -0.2}, {0.5, 0.5}}); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { EmbeddedChain({0, 0}, {{0.5, 0.5}, {0.5, 0.5}}); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { EmbeddedChain({0}, {{0.5, 0.5}}); }) == ErrorCode::ValidationError);
    CHECK_NOTHROW(EmbeddedChain({0, 1}, {{0.3, 0.7}, {1.0 - 1e-13, 1e-13}}));
    const auto chain = alternating();
    CHECK(chain.index_of(1) == 1);
    CHECK(code_of([&] { (void)chain.index_of(5); }) == ErrorCode::UnknownState);
}

TEST_CASE("chain frequencies") {
    SECTION("against the Cesaro oracle") {
        const std::vector<Matrix> ms = {
            {{0.0, 1.0}, {1.0, 0.0}},
            {{0.1, 0.6, 0.3}, {0.4, 0.4, 0.2}, {0.5, 0.0, 0.5}},
            {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}},
            // state 0 is transient
            {{0.2, 0.4, 0.4}, {0.0, 0.3, 0.7}, {0.0, 0.9, 0.1}},
        };
        for (const auto& m : ms) {
            std::vector<int> labels;
            for (std::size_t i = 0; i < m.size(); ++i) labels.push_back(static_cast<int>(10 * i));
            const auto p = lwp::chain_frequencies(EmbeddedChain(labels, m));
            const auto oracle = cesaro(m);
            double total = 0.0;
            for (std::size_t i = 0; i < m.size(); ++i) {
                CHECK_THAT(p[i], WithinAbs(oracle[i], 1e-3));
                total += p[i];
            }
            CHECK_THAT(total, WithinAbs(1.0, 1e-12));
        }
    }
    SECTION("transient states get zero weight") {
        const auto p = lwp::chain_frequencies(EmbeddedChain({0, 1, 2}, {{0.2, 0.4, 0.4}, {0.0, 0.3, 0.7}, {0.0, 0.9, 0.1}}));
        CHECK(p[0] == 0.0);
        CHECK_THAT(p[1], WithinAbs(9.0 / 16.0, 1e-12));
    }
    SECTION("two closed classes") {
        CHECK(code_of([] { (void)lwp::chain_frequencies(EmbeddedChain({0, 1}, {{1.0, 0.0}, {0.0, 1.0}})); }) ==
              ErrorCode::MultipleClosedClasses);
    }
}

TEST_CASE("stationary law of the alternating exponential/uniform process") {
    const std::vector<Distribution> laws{Distribution::exponential(1.0), Distribution::uniform(0.0, 2.0)};
    const auto law = lwp::stationary_law(alternating(), laws);
    CHECK_THAT(law.mean_weight(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(law.query(1, 0.5, 0.5), WithinAbs(0.125, 1e-15));
    CHECK_THAT(law.query(0, 0.0, 0.0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(law.query(0, 0.3, 0.2), WithinAbs(0.5 * std::exp(-0.5), 1e-15));
    CHECK_THAT(law.level_probability(1), WithinAbs(0.5, 1e-15));
    CHECK_THAT(law.mean_cycle_length(0), WithinAbs(2.0, 1e-15));
    // x and x* enter only through a + b
    CHECK_THAT(law.query(1, 0.2, 0.8), WithinAbs(law.query(1, 0.8, 0.2), 1e-15));
}

TEST_CASE("stationary law invariants on random chains") {
    lwp::Rng rng = lwp::make_stream(99, 0);
    const std::vector<Distribution> pool{Distribution::exponential(2.0), Distribution::uniform(0.1, 1.3),
                                         Distribution::gamma(3.0, 0.4), Distribution::deterministic(0.7),
                                         Distribution::discrete({{0.5, 0.5}, {std::sqrt(3.0), 0.5}})};
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
        Matrix m(n, std::vector<double>(n));
        for (auto& row : m) {
            double s = 0.0;
            for (auto& v : row) s += (v = lwp::uniform_open(rng));
            for (auto& v : row) v /= s;
        }
        std::vector<int> labels;
        std::vector<Distribution> laws;
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(static_cast<int>(i) + 1);
            laws.push_back(pool[(i + static_cast<std::size_t>(trial)) % pool.size()]);
        }
        if (!lwp::common_support_nonlattice(laws)) continue;
        const auto law = lwp::stationary_law(EmbeddedChain(labels, m), laws);
        double total = 0.0;
        double levels = 0.0;
        for (int s : labels) {
            total += law.query(s, 0.0, 0.0);
            levels += law.level_probability(s);
            double prev = law.query(s, 0.0, 0.0);
            for (double c = 0.1; c < 3.0; c += 0.1) {
                const double q = law.query(s, c, 0.0);
                CHECK(q <= prev + 1e-15);
                prev = q;
            }
        }
        CHECK_THAT(total, WithinAbs(1.0, 1e-10));
        CHECK_THAT(levels, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("ergodicity gates") {
    CHECK(code_of([] {
              (void)lwp::stationary_law(alternating(), {Distribution::deterministic(1.0), Distribution::deterministic(2.0)});
          }) == ErrorCode::LatticeSupport);
    CHECK_NOTHROW(lwp::stationary_law(alternating(), {Distribution::deterministic(1.0), Distribution::deterministic(std::sqrt(2.0))}));
    // Only essential levels count: a continuous transient level does not rescue a lattice class.
    CHECK(code_of([] {
              (void)lwp::stationary_law(EmbeddedChain({0, 1, 2}, {{0.0, 0.5, 0.5}, {0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}}),
                                        {Distribution::exponential(1.0), Distribution::deterministic(1.0),
                                         Distribution::deterministic(2.0)});
          }) == ErrorCode::LatticeSupport);
    CHECK_NOTHROW(lwp::stationary_law(EmbeddedChain({0, 1}, {{0.5, 0.5}, {0.0, 1.0}}),
                                      {Distribution::deterministic(1.0), Distribution::exponential(1.0)}));
    const auto law = lwp::stationary_law(EmbeddedChain({0, 1}, {{0.5, 0.5}, {0.0, 1.0}}),
                                         {Distribution::deterministic(1.0), Distribution::exponential(1.0)});
    CHECK(code_of([&] { (void)law.mean_cycle_length(0); }) == ErrorCode::TransientState);
    CHECK(code_of([] {
              lwp::LinearwiseProcess(alternating(), {Distribution::exponential(1.0)}, 0);
          }) == ErrorCode::InvalidArgument);
}

TEST_CASE("trajectories and observation") {
    const lwp::LinearwiseProcess proc(alternating(), {Distribution::deterministic(1.0), Distribution::deterministic(2.0)}, 0,
                                      0.25);
    lwp::Rng rng = lwp::make_stream(1, 0);
    const auto traj = lwp::simulate(proc, 5.0, rng);
    REQUIRE(traj.level_indices.size() == traj.jump_times.size() + 1);
    CHECK_THAT(traj.jump_times[0], WithinAbs(0.75, 1e-15));
    CHECK_THAT(traj.jump_times[1], WithinAbs(2.75, 1e-15));
    CHECK(traj.jump_times.back() > 5.0);
    auto o = lwp::observe_state(traj, 0.5);
    CHECK(o.level == 0);
    CHECK_THAT(o.x, WithinAbs(0.75, 1e-15));  // t + x0 before the first jump
    CHECK_THAT(o.x_star, WithinAbs(0.25, 1e-15));
    o = lwp::observe_state(traj, 2.75);
    CHECK(o.level == 0);
    CHECK(o.x == 0.0);
    CHECK_THAT(o.x_star, WithinAbs(1.0, 1e-15));
}

TEST_CASE("an age beyond the support ends the first stay at once") {
    const lwp::LinearwiseProcess proc(alternating(), {Distribution::exponential(1.0), Distribution::uniform(0.0, 2.0)}, 1, 7.0);
    lwp::Rng rng = lwp::make_stream(2, 0);
    const auto traj = lwp::simulate(proc, 3.0, rng);
    CHECK(traj.jump_times.front() == 0.0);
    CHECK(lwp::observe_state(traj, 0.0).level == 0);
}

TEST_CASE("first hits and regeneration cycles") {
    const lwp::LinearwiseProcess proc(alternating(), {Distribution::deterministic(1.0), Distribution::deterministic(2.0)}, 0);
    lwp::Rng rng = lwp::make_stream(3, 0);
    CHECK_THAT(lwp::first_hit_time(proc, 1, rng), WithinAbs(1.0, 1e-15));
    CHECK_THAT(lwp::first_hit_time(proc, 0, rng), WithinAbs(3.0, 1e-15));
    const auto cycles = lwp::regeneration_cycles(proc, 1, 5, rng);
    REQUIRE(cycles.size() == 5);
    for (double c : cycles) CHECK_THAT(c, WithinAbs(3.0, 1e-12));

    const lwp::LinearwiseProcess transient(EmbeddedChain({0, 1}, {{0.5, 0.5}, {0.0, 1.0}}),
                                           {Distribution::exponential(1.0), Distribution::exponential(1.0)}, 1);
    CHECK(code_of([&] { (void)lwp::first_hit_time(transient, 0, rng); }) == ErrorCode::TransientState);
}

TEST_CASE("mean regeneration cycle is T / p_k") {
    const std::vector<Distribution> laws{Distribution::exponential(1.0), Distribution::uniform(0.0, 4.0)};
    const EmbeddedChain chain({0, 1}, {{0.0, 1.0}, {1.0, 0.0}});
    const lwp::LinearwiseProcess proc(chain, laws, 0);
    lwp::Rng rng = lwp::make_stream(4, 0);
    const auto cycles = lwp::regeneration_cycles(proc, 0, 20000, rng);
    const auto est = lwp::estimate_mean(cycles);
    const auto law = lwp::stationary_law(chain, laws);
    CHECK_THAT(law.level_probability(0), WithinAbs(1.0 / 3.0, 1e-15));
    CHECK_THAT(est.mean, WithinAbs(law.mean_cycle_length(0), est.half_width(lwp::kZ999)));
}

TEST_CASE("estimated law matches the analytic one and ignores worker count") {
    const std::vector<Distribution> laws{Distribution::exponential(1.0), Distribution::uniform(0.0, 2.0)};
    const lwp::LinearwiseProcess proc(alternating(), laws, 0);
    const auto emp1 = lwp::estimate_law(proc, 30.0, 30000, {5, 1});
    const auto emp4 = lwp::estimate_law(proc, 30.0, 30000, {5, 4});
    REQUIRE(emp1.replicas() == emp4.replicas());
    for (std::size_t i = 0; i < emp1.replicas(); ++i) {
        CHECK(emp1.observations()[i].x_star == emp4.observations()[i].x_star);
        CHECK(emp1.observations()[i].level == emp4.observations()[i].level);
    }
    const auto law = lwp::stationary_law(alternating(), laws);
    for (auto [s, a, b] : {std::tuple{1, 0.5, 0.5}, std::tuple{0, 0.0, 1.0}, std::tuple{1, 1.0, 0.2}}) {
        const auto pe = emp1.probability(s, a, b, lwp::kZ999);
        CHECK_THAT(pe.estimate, WithinAbs(law.query(s, a, b), lwp::binomial_half_width(law.query(s, a, b), 30000, lwp::kZ999)));
    }
}
