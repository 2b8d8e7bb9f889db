#include "lwp/error.hpp"
#include "lwp/renewal.hpp"
#include "lwp/stats.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using lwp::Distribution;

namespace {

// H(t) for Uniform(0,1) cycles: sum_{k<=t} (-1)^k e^{t-k} (t-k)^k / k! - 1.
double uniform_renewal(double t) {
    double sum = 0.0;
    for (int k = 0; k <= static_cast<int>(std::floor(t)); ++k)
        sum += (k % 2 ? -1.0 : 1.0) * std::exp(t - k) * std::pow(t - k, k) / std::tgamma(k + 1.0);
    return sum - 1.0;
}

// H(t) for Gamma(2,1) cycles.
double gamma2_renewal(double t) { return t / 2.0 - 0.25 + std::exp(-2.0 * t) / 4.0; }

double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    if (b <= a) return 0.0;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

lwp::ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const lwp::Error& e) {
        return e.code();
    }
    FAIL("expected an lwp::Error");
    return lwp::ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("renewal function of the Poisson process is t") {
    const auto table = lwp::renewal_function(Distribution::exponential(1.0), 10.0, 0.001);
    double err = 0.0;
    for (std::size_t j = 0; j < table.values().size(); ++j)
        err = std::max(err, std::abs(table.values()[j] - 0.001 * static_cast<double>(j)));
    CHECK(err <= 0.01);
    CHECK(err <= table.discretization_bound());
    CHECK(table.values()[0] == 0.0);
    CHECK_THAT(table.t_max(), WithinRel(10.0, 1e-12));
}

TEST_CASE("renewal function matches closed forms") {
    SECTION("uniform cycles") {
        const auto table = lwp::renewal_function(Distribution::uniform(0.0, 1.0), 6.0, 0.001);
        for (double t : {0.3, 0.999, 1.0, 1.5, 2.7, 4.0, 6.0})
            CHECK_THAT(table.at(t), WithinAbs(uniform_renewal(t), table.discretization_bound()));
    }
    SECTION("gamma(2,1) cycles") {
        const auto table = lwp::renewal_function(Distribution::gamma(2.0, 1.0), 15.0);
        CHECK_THAT(table.step(), WithinRel(0.002, 1e-12));  // default mean / 1000
        for (double t : {0.5, 1.0, 3.0, 9.0, 15.0})
            CHECK_THAT(table.at(t), WithinAbs(gamma2_renewal(t), table.discretization_bound()));
    }
}

TEST_CASE("grid table satisfies the renewal equation") {
    for (const auto& d : {Distribution::uniform(0.0, 1.0), Distribution::gamma(0.7, 1.0),
                          Distribution::mixture({0.5, 0.5}, {Distribution::exponential(3.0), Distribution::deterministic(1.0)})}) {
        INFO(d.describe());
        const auto table = lwp::renewal_function(d, 8.0, 0.002);
        CHECK(table.renewal_equation_residual() <= 0.5 * table.discretization_bound() + 1e-12);
        const auto v = table.values();
        for (std::size_t j = 1; j < v.size(); ++j) CHECK(v[j] >= v[j - 1] - 1e-12);
    }
}

TEST_CASE("renewal table range") {
    const auto table = lwp::renewal_function(Distribution::exponential(1.0), 2.0, 0.01);
    CHECK(code_of([&] { (void)table.at(2.5); }) == lwp::ErrorCode::OutOfRange);
    CHECK(code_of([&] { (void)lwp::key_renewal_integral([](double) { return 1.0; }, table, 3.0); }) ==
          lwp::ErrorCode::OutOfRange);
}

TEST_CASE("key renewal integral and limit") {
    const auto e = Distribution::exponential(1.0);
    const auto table = lwp::renewal_function(e, 20.0, 0.001);
    const lwp::Kernel b = [](double s) { return std::exp(-s); };
    CHECK_THAT(lwp::key_renewal_limit(b, e), WithinAbs(1.0, 1e-10));
    CHECK_THAT(lwp::key_renewal_integral(b, table, 20.0), WithinAbs(1.0, 0.01));

    SECTION("b = S gives 1 - S(t) for any cycle") {
        const auto u = Distribution::gamma(1.5, 1.0);
        const auto tab = lwp::renewal_function(u, 10.0, 0.002);
        const lwp::Kernel s = [u](double x) { return u.survival(x); };
        for (double t : {0.5, 2.0, 7.0, 10.0})
            CHECK_THAT(lwp::key_renewal_integral(s, tab, t), WithinAbs(1.0 - u.survival(t), 2 * tab.discretization_bound()));
    }
    SECTION("convergence series approaches the limit") {
        const auto series = lwp::key_renewal_convergence(b, table, 1.0);
        REQUIRE(series.size() >= 4);
        CHECK(std::abs(series.back().gap) < 0.01);
    }
    SECTION("errors") {
        CHECK(code_of([&] { (void)lwp::key_renewal_limit(b, Distribution::deterministic(1.0)); }) ==
              lwp::ErrorCode::LatticeCycle);
        CHECK(code_of([&] { (void)lwp::key_renewal_limit([](double) { return 1.0; }, e); }) == lwp::ErrorCode::NonFinite);
    }
}

TEST_CASE("overjump and underjump observation") {
    lwp::RenewalTrajectory traj;
    traj.jump_times = {1.0, 2.5, 4.0};
    traj.horizon = 3.0;
    traj.cycle = Distribution::exponential(1.0);
    auto o = lwp::observe_over_under(traj, 0.5);
    CHECK_THAT(o.x, WithinAbs(0.5, 1e-15));
    CHECK_THAT(o.x_star, WithinAbs(0.5, 1e-15));
    o = lwp::observe_over_under(traj, 2.5);  // a jump exactly at t has happened
    CHECK(o.x == 0.0);
    CHECK_THAT(o.x_star, WithinAbs(1.5, 1e-15));
    o = lwp::observe_over_under(traj, 3.0);
    CHECK_THAT(o.x, WithinAbs(0.5, 1e-15));
    CHECK_THAT(o.x_star, WithinAbs(1.0, 1e-15));
}

TEST_CASE("simulated paths") {
    lwp::Rng rng = lwp::make_stream(7, 0);
    const auto traj = lwp::simulate_renewal(std::nullopt, Distribution::deterministic(1.0), 3.5, rng);
    REQUIRE(traj.jump_times.size() == 4);
    CHECK(traj.jump_times.back() == 4.0);
    const auto delayed =
        lwp::simulate_renewal(Distribution::deterministic(0.25), Distribution::uniform(0.5, 1.5), 20.0, rng);
    CHECK(delayed.jump_times.front() == 0.25);
    CHECK(delayed.jump_times.back() > 20.0);
    for (std::size_t i = 1; i < delayed.jump_times.size(); ++i) {
        const double gap = delayed.jump_times[i] - delayed.jump_times[i - 1];
        CHECK(gap >= 0.5);
        CHECK(gap <= 1.5);
        if (i + 1 < delayed.jump_times.size()) CHECK(delayed.jump_times[i] <= 20.0);
    }
}

TEST_CASE("exact overjump law on the grid") {
    SECTION("Poisson: R(s,t) = exp(-s)") {
        const auto e = Distribution::exponential(1.0);
        const auto table = lwp::renewal_function(e, 5.0, 0.001);
        for (double t : {0.0, 0.7, 2.0, 5.0})
            for (double s : {0.0, 0.5, 1.0, 3.0})
                CHECK_THAT(lwp::overjump_survival_exact(e, table, s, t), WithinAbs(std::exp(-s), 2 * table.discretization_bound()));
    }
    SECTION("uniform before the second renewal can be forced") {
        // For t < 1 the renewal density is e^u, so R(s,t) = S(t+s) + int_0^t S(t-u+s) e^u du.
        const auto u = Distribution::uniform(0.0, 1.0);
        const auto table = lwp::renewal_function(u, 2.0, 0.0005);
        for (double t : {0.2, 0.5, 0.9})
            for (double s : {0.05, 0.3, 0.5}) {
                const double oracle =
                    u.survival(t + s) + simpson([&](double x) { return u.survival(t - x + s) * std::exp(x); }, 0.0, t);
                CHECK_THAT(lwp::overjump_survival_exact(u, table, s, t), WithinAbs(oracle, 2 * table.discretization_bound()));
            }
        CHECK(lwp::overjump_survival_exact(u, table, 0.0, 1.3) == 1.0);
    }
    SECTION("Monte Carlo agrees with the exact value") {
        const auto u = Distribution::uniform(0.0, 1.0);
        const auto table = lwp::renewal_function(u, 3.0, 0.001);
        const double times[] = {0.5, 2.5};
        const std::size_t n = 40000;
        std::size_t hits[2] = {0, 0};
        lwp::Rng rng = lwp::make_stream(11, 0);
        std::vector<lwp::OverUnder> obs(2);
        for (std::size_t i = 0; i < n; ++i) {
            lwp::sample_over_under(u, times, rng, obs);
            hits[0] += obs[0].x_star > 0.3;
            hits[1] += obs[1].x_star > 0.3;
        }
        for (int j = 0; j < 2; ++j) {
            const double exact = lwp::overjump_survival_exact(u, table, 0.3, times[j]);
            const double band = lwp::binomial_half_width(exact, n, lwp::kZ999) + 2 * table.discretization_bound();
            CHECK_THAT(static_cast<double>(hits[j]) / n, WithinAbs(exact, band));
        }
    }
}

TEST_CASE("stationary overjump law") {
    const auto u = Distribution::uniform(0.0, 1.0);
    auto v = lwp::stationary_overjump_survival(u, 0.5);
    CHECK_THAT(v.value, WithinAbs(0.25, 1e-15));
    CHECK_FALSE(v.lattice_warning);
    CHECK_THAT(lwp::stationary_overjump_mean(u).value, WithinAbs(1.0 / 3.0, 1e-15));
    CHECK_THAT(lwp::stationary_overjump_mean(Distribution::exponential(2.0)).value, WithinRel(0.5, 1e-14));
    const auto det = lwp::stationary_overjump_survival(Distribution::deterministic(1.0), 0.25);
    CHECK(det.lattice_warning);
    CHECK_THAT(det.value, WithinAbs(0.75, 1e-15));
    CHECK(lwp::is_lattice(Distribution::discrete({{1.0, 0.5}, {3.0, 0.5}})));
    CHECK_FALSE(lwp::is_lattice(u));
}

TEST_CASE("sampling over/under is reproducible per stream") {
    const auto g = Distribution::gamma(2.0, 0.5);
    const double times[] = {1.0, 5.0};
    std::vector<lwp::OverUnder> a(2), b(2);
    lwp::Rng r1 = lwp::make_stream(5, 9);
    lwp::Rng r2 = lwp::make_stream(5, 9);
    lwp::sample_over_under(g, times, r1, a);
    lwp::sample_over_under(g, times, r2, b);
    CHECK(a[0].x == b[0].x);
    CHECK(a[1].x_star == b[1].x_star);
    CHECK(a[0].x <= 1.0);
    CHECK(a[1].x + a[1].x_star > 0.0);
}
