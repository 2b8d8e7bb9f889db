#include "lwp/dist.hpp"

#include "lwp/error.hpp"
#include "lwp/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <variant>

namespace lwp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Exponential {
    double rate;
};
struct Uniform {
    double lo, hi;
};
struct Gamma {
    double shape, scale;
};
struct Deterministic {
    double value;
};
// Shared by discrete and empirical laws: sorted distinct values with
// probabilities, plus suffix sums used by the tail integral.
struct Atoms {
    std::vector<double> values;
    std::vector<double> probs;
    std::vector<double> cum;          // cum[i] = P(X <= values[i])
    std::vector<double> suffix_mass;  // sum_{j>=i} probs[j]
    std::vector<double> suffix_first; // sum_{j>=i} probs[j] * values[j]
    bool empirical = false;
    std::size_t sample_count = 0;
};
struct Mixture {
    std::vector<double> weights;
    std::vector<double> cum;
    std::vector<Distribution> components;
};
struct Residual {
    Distribution base;
    double offset;
    double base_survival;  // survival of base at offset, > 0
};

Atoms make_atoms(std::vector<std::pair<double, double>> points, bool empirical, std::size_t n) {
    std::sort(points.begin(), points.end());
    Atoms a;
    a.empirical = empirical;
    a.sample_count = n;
    for (const auto& [v, p] : points) {
        if (p <= 0.0) continue;
        if (!a.values.empty() && a.values.back() == v) {
            a.probs.back() += p;
        } else {
            a.values.push_back(v);
            a.probs.push_back(p);
        }
    }
    const std::size_t m = a.values.size();
    a.cum.resize(m);
    std::partial_sum(a.probs.begin(), a.probs.end(), a.cum.begin());
    a.suffix_mass.assign(m + 1, 0.0);
    a.suffix_first.assign(m + 1, 0.0);
    for (std::size_t i = m; i-- > 0;) {
        a.suffix_mass[i] = a.suffix_mass[i + 1] + a.probs[i];
        a.suffix_first[i] = a.suffix_first[i + 1] + a.probs[i] * a.values[i];
    }
    return a;
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

struct Distribution::State {
    std::variant<Exponential, Uniform, Gamma, Deterministic, Atoms, Mixture, Residual> law;
    double mean = 0.0;
    double second = 0.0;
};

namespace {

using State = Distribution::State;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double residual_survival(const Residual& r, double s) {
    if (s < 0.0) return 1.0;
    return std::clamp(r.base.survival(s + r.offset) / r.base_survival, 0.0, 1.0);
}

}  // namespace

// -------------------------------------------------------------------------
// Construction

Distribution Distribution::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw Error(ErrorCode::InvalidArgument, "exponential rate must be positive, got " + fmt_num(rate));
    auto st = std::make_shared<State>();
    st->law = Exponential{rate};
    st->mean = 1.0 / rate;
    st->second = 2.0 / (rate * rate);
    return Distribution(std::move(st));
}

Distribution Distribution::uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi))
        throw Error(ErrorCode::InvalidArgument,
                    "uniform requires 0 <= lo < hi, got lo=" + fmt_num(lo) + " hi=" + fmt_num(hi));
    auto st = std::make_shared<State>();
    st->law = Uniform{lo, hi};
    st->mean = 0.5 * (lo + hi);
    st->second = (hi * hi + hi * lo + lo * lo) / 3.0;
    return Distribution(std::move(st));
}

Distribution Distribution::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale))
        throw Error(ErrorCode::InvalidArgument, "gamma shape and scale must be positive");
    auto st = std::make_shared<State>();
    st->law = Gamma{shape, scale};
    st->mean = shape * scale;
    st->second = shape * (shape + 1.0) * scale * scale;
    return Distribution(std::move(st));
}

Distribution Distribution::deterministic(double value) {
    if (value == 0.0) throw Error(ErrorCode::AtomAtZero, "deterministic law at 0");
    if (!(value > 0.0) || !std::isfinite(value))
        throw Error(ErrorCode::InvalidArgument, "deterministic value must be positive, got " + fmt_num(value));
    auto st = std::make_shared<State>();
    st->law = Deterministic{value};
    st->mean = value;
    st->second = value * value;
    return Distribution(std::move(st));
}

Distribution Distribution::point_mass_at_zero() {
    auto st = std::make_shared<State>();
    st->law = Deterministic{0.0};
    return Distribution(std::move(st));
}

Distribution Distribution::discrete(std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw Error(ErrorCode::InvalidArgument, "discrete law needs at least one point");
    double total = 0.0;
    for (const auto& [v, p] : points) {
        if (!std::isfinite(v) || v < 0.0 || !std::isfinite(p) || p < 0.0)
            throw Error(ErrorCode::InvalidArgument, "discrete points need value >= 0 and prob >= 0");
        if (v == 0.0 && p > 0.0) throw Error(ErrorCode::AtomAtZero, "discrete law has mass at 0");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "discrete probabilities sum to " + fmt_num(total));
    for (auto& pt : points) pt.second /= total;
    auto st = std::make_shared<State>();
    Atoms a = make_atoms(std::move(points), false, 0);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        st->mean += a.probs[i] * a.values[i];
        st->second += a.probs[i] * a.values[i] * a.values[i];
    }
    st->law = std::move(a);
    return Distribution(std::move(st));
}

Distribution Distribution::empirical(std::vector<double> samples) {
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "empirical law needs samples");
    for (double v : samples) {
        if (v == 0.0) throw Error(ErrorCode::AtomAtZero, "empirical sample equal to 0");
        if (!std::isfinite(v) || v < 0.0)
            throw Error(ErrorCode::InvalidArgument, "empirical samples must be finite and positive");
    }
    const std::size_t n = samples.size();
    const double w = 1.0 / static_cast<double>(n);
    std::vector<std::pair<double, double>> points;
    points.reserve(n);
    for (double v : samples) points.emplace_back(v, w);
    auto st = std::make_shared<State>();
    Atoms a = make_atoms(std::move(points), true, n);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        st->mean += a.probs[i] * a.values[i];
        st->second += a.probs[i] * a.values[i] * a.values[i];
    }
    st->law = std::move(a);
    return Distribution(std::move(st));
}

Distribution Distribution::mixture(std::vector<double> weights, std::vector<Distribution> components) {
    if (weights.empty() || weights.size() != components.size())
        throw Error(ErrorCode::InvalidArgument, "mixture needs one weight per component");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw Error(ErrorCode::InvalidArgument, "mixture weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "mixture weights sum to " + fmt_num(total));
    for (const auto& c : components)
        if (c.is_point_mass_at_zero()) throw Error(ErrorCode::AtomAtZero, "mixture component is a point mass at 0");

    Mixture m;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] == 0.0) continue;
        m.weights.push_back(weights[i] / total);
        m.components.push_back(components[i]);
    }
    m.cum.resize(m.weights.size());
    std::partial_sum(m.weights.begin(), m.weights.end(), m.cum.begin());
    auto st = std::make_shared<State>();
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        st->mean += m.weights[i] * m.components[i].mean();
        st->second += m.weights[i] * m.components[i].second_moment();
    }
    st->law = std::move(m);
    return Distribution(std::move(st));
}

// -------------------------------------------------------------------------
// Queries

DistributionKind Distribution::kind() const {
    return std::visit(Overloaded{
                          [](const Exponential&) { return DistributionKind::Exponential; },
                          [](const Uniform&) { return DistributionKind::Uniform; },
                          [](const Gamma&) { return DistributionKind::Gamma; },
                          [](const Deterministic&) { return DistributionKind::Deterministic; },
                          [](const Atoms& a) {
                              return a.empirical ? DistributionKind::Empirical : DistributionKind::Discrete;
                          },
                          [](const Mixture&) { return DistributionKind::Mixture; },
                          [](const Residual&) { return DistributionKind::Residual; },
                      },
                      state_->law);
}

std::string Distribution::describe() const {
    return std::visit(
        Overloaded{
            [](const Exponential& e) { return "exponential(rate=" + fmt_num(e.rate) + ")"; },
            [](const Uniform& u) { return "uniform(lo=" + fmt_num(u.lo) + ", hi=" + fmt_num(u.hi) + ")"; },
            [](const Gamma& g) {
                return "gamma(shape=" + fmt_num(g.shape) + ", scale=" + fmt_num(g.scale) + ")";
            },
            [](const Deterministic& d) { return "deterministic(" + fmt_num(d.value) + ")"; },
            [](const Atoms& a) {
                return std::string(a.empirical ? "empirical(n=" + std::to_string(a.sample_count)
                                               : "discrete(atoms=" + std::to_string(a.values.size())) +
                       ")";
            },
            [](const Mixture& m) {
                std::string s = "mixture(";
                for (std::size_t i = 0; i < m.weights.size(); ++i) {
                    if (i) s += ", ";
                    s += fmt_num(m.weights[i]) + "*" + m.components[i].describe();
                }
                return s + ")";
            },
            [](const Residual& r) {
                return "residual(" + r.base.describe() + ", age=" + fmt_num(r.offset) + ")";
            },
        },
        state_->law);
}

bool Distribution::is_point_mass_at_zero() const {
    const auto* d = std::get_if<Deterministic>(&state_->law);
    return d != nullptr && d->value == 0.0;
}

double Distribution::survival(double s) const {
    if (s < 0.0) return 1.0;
    return std::visit(
        Overloaded{
            [s](const Exponential& e) { return std::exp(-e.rate * s); },
            [s](const Uniform& u) { return std::clamp((u.hi - s) / (u.hi - u.lo), 0.0, 1.0); },
            [s](const Gamma& g) { return boost::math::gamma_q(g.shape, s / g.scale); },
            [s](const Deterministic& d) { return s < d.value ? 1.0 : 0.0; },
            [s](const Atoms& a) {
                const auto it = std::upper_bound(a.values.begin(), a.values.end(), s);
                return a.suffix_mass[static_cast<std::size_t>(it - a.values.begin())];
            },
            [s](const Mixture& m) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m.weights.size(); ++i) acc += m.weights[i] * m.components[i].survival(s);
                return std::clamp(acc, 0.0, 1.0);
            },
            [s](const Residual& r) { return residual_survival(r, s); },
        },
        state_->law);
}

double Distribution::cdf(double s) const {
    if (s < 0.0) return 0.0;
    return std::visit(
        Overloaded{
            [s](const Exponential& e) { return -std::expm1(-e.rate * s); },
            [s](const Uniform& u) { return std::clamp((s - u.lo) / (u.hi - u.lo), 0.0, 1.0); },
            [s](const Gamma& g) { return boost::math::gamma_p(g.shape, s / g.scale); },
            [s](const Deterministic& d) { return s >= d.value ? 1.0 : 0.0; },
            [s](const Atoms& a) {
                const auto it = std::upper_bound(a.values.begin(), a.values.end(), s);
                return it == a.values.begin() ? 0.0 : std::min(1.0, a.cum[static_cast<std::size_t>(it - a.values.begin()) - 1]);
            },
            [this, s](const Mixture&) { return 1.0 - survival(s); },
            [s](const Residual& r) { return 1.0 - residual_survival(r, s); },
        },
        state_->law);
}

double Distribution::mean() const { return state_->mean; }
double Distribution::second_moment() const { return state_->second; }

double Distribution::tail_integral(double a) const {
    if (!std::isfinite(mean())) throw Error(ErrorCode::InfiniteMean, describe() + " has no finite mean");
    if (a < 0.0) return tail_integral(0.0) - a;
    return std::visit(
        Overloaded{
            [a](const Exponential& e) { return std::exp(-e.rate * a) / e.rate; },
            [a](const Uniform& u) {
                if (a <= u.lo) return (u.lo - a) + 0.5 * (u.hi - u.lo);
                if (a >= u.hi) return 0.0;
                return 0.5 * (u.hi - a) * (u.hi - a) / (u.hi - u.lo);
            },
            [a](const Gamma& g) {
                const double z = a / g.scale;
                const double v = g.scale * (g.shape * boost::math::gamma_q(g.shape + 1.0, z) -
                                            z * boost::math::gamma_q(g.shape, z));
                return std::max(v, 0.0);
            },
            [a](const Deterministic& d) { return std::max(d.value - a, 0.0); },
            [a](const Atoms& at) {
                const auto idx = static_cast<std::size_t>(
                    std::upper_bound(at.values.begin(), at.values.end(), a) - at.values.begin());
                return std::max(at.suffix_first[idx] - a * at.suffix_mass[idx], 0.0);
            },
            [a](const Mixture& m) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m.weights.size(); ++i)
                    acc += m.weights[i] * m.components[i].tail_integral(a);
                return acc;
            },
            [a](const Residual& r) { return r.base.tail_integral(a + r.offset) / r.base_survival; },
        },
        state_->law);
}

double Distribution::moment(int k) const {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "moment order must be >= 1");
    const double kd = static_cast<double>(k);
    return std::visit(
        Overloaded{
            [kd](const Exponential& e) { return std::tgamma(kd + 1.0) / std::pow(e.rate, kd); },
            [kd](const Uniform& u) {
                return (std::pow(u.hi, kd + 1.0) - std::pow(u.lo, kd + 1.0)) / ((kd + 1.0) * (u.hi - u.lo));
            },
            [k](const Gamma& g) {
                double acc = 1.0;
                for (int j = 0; j < k; ++j) acc *= (g.shape + j) * g.scale;
                return acc;
            },
            [kd](const Deterministic& d) { return std::pow(d.value, kd); },
            [kd](const Atoms& a) {
                double acc = 0.0;
                for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.probs[i] * std::pow(a.values[i], kd);
                return acc;
            },
            [k](const Mixture& m) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m.weights.size(); ++i) acc += m.weights[i] * m.components[i].moment(k);
                return acc;
            },
            [k, kd](const Residual& r) {
                if (!std::isfinite(r.base.moment(k))) return kInf;
                // E Y^k = k * int_0^inf s^(k-1) P(Y > s) ds
                auto integrand = [&](double s) { return kd * std::pow(s, kd - 1.0) * residual_survival(r, s); };
                const auto res = quad::integrate_to_infinity(integrand, 0.0);
                return res.converged ? res.value : kInf;
            },
        },
        state_->law);
}

double Distribution::exp_moment(double alpha) const {
    if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "exp_moment requires alpha > 0");
    return std::visit(
        Overloaded{
            [alpha](const Exponential& e) { return alpha < e.rate ? e.rate / (e.rate - alpha) : kInf; },
            [alpha](const Uniform& u) {
                const double w = u.hi - u.lo;
                return std::exp(alpha * u.lo) * std::expm1(alpha * w) / (alpha * w);
            },
            [alpha](const Gamma& g) {
                return alpha * g.scale < 1.0 ? std::pow(1.0 - alpha * g.scale, -g.shape) : kInf;
            },
            [alpha](const Deterministic& d) { return std::exp(alpha * d.value); },
            [alpha](const Atoms& a) {
                double acc = 0.0;
                for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.probs[i] * std::exp(alpha * a.values[i]);
                return acc;
            },
            [alpha](const Mixture& m) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m.weights.size(); ++i)
                    acc += m.weights[i] * m.components[i].exp_moment(alpha);
                return acc;
            },
            [alpha](const Residual& r) {
                if (!std::isfinite(r.base.exp_moment(alpha))) return kInf;
                // E e^(alpha Y) = 1 + alpha * int_0^inf e^(alpha s) P(Y > s) ds
                auto integrand = [&](double s) { return std::exp(alpha * s) * residual_survival(r, s); };
                const auto res = quad::integrate_to_infinity(integrand, 0.0);
                return res.converged ? 1.0 + alpha * res.value : kInf;
            },
        },
        state_->law);
}

Distribution Distribution::residual(double a) const {
    if (!(a > 0.0)) return *this;
    const double surv = survival(a);
    if (surv <= 0.0) return point_mass_at_zero();

    auto generic = [&](const Distribution& base, double offset) {
        auto st = std::make_shared<State>();
        Residual r{base, offset, base.survival(offset)};
        st->mean = base.tail_integral(offset) / r.base_survival;
        st->law = r;
        Distribution d(st);
        st->second = d.moment(2);
        return d;
    };

    return std::visit(
        Overloaded{
            [this](const Exponential&) { return *this; },
            [a](const Uniform& u) {
                return a < u.lo ? Distribution::uniform(u.lo - a, u.hi - a) : Distribution::uniform(0.0, u.hi - a);
            },
            [&](const Gamma&) { return generic(*this, a); },
            [a](const Deterministic& d) { return Distribution::deterministic(d.value - a); },
            [a](const Atoms& at) {
                if (at.empirical) {
                    std::vector<double> rest;
                    for (std::size_t i = 0; i < at.values.size(); ++i) {
                        if (at.values[i] <= a) continue;
                        const auto copies = static_cast<std::size_t>(
                            std::llround(at.probs[i] * static_cast<double>(at.sample_count)));
                        rest.insert(rest.end(), std::max<std::size_t>(copies, 1), at.values[i] - a);
                    }
                    return Distribution::empirical(std::move(rest));
                }
                std::vector<std::pair<double, double>> pts;
                double mass = 0.0;
                for (std::size_t i = 0; i < at.values.size(); ++i)
                    if (at.values[i] > a) mass += at.probs[i];
                for (std::size_t i = 0; i < at.values.size(); ++i)
                    if (at.values[i] > a) pts.emplace_back(at.values[i] - a, at.probs[i] / mass);
                return Distribution::discrete(std::move(pts));
            },
            [a, surv](const Mixture& m) {
                std::vector<double> w;
                std::vector<Distribution> comps;
                for (std::size_t i = 0; i < m.weights.size(); ++i) {
                    const double si = m.components[i].survival(a);
                    if (si <= 0.0) continue;
                    w.push_back(m.weights[i] * si / surv);
                    comps.push_back(m.components[i].residual(a));
                }
                const double total = std::accumulate(w.begin(), w.end(), 0.0);
                for (double& x : w) x /= total;
                return Distribution::mixture(std::move(w), std::move(comps));
            },
            [&](const Residual& r) {
                const double offset = r.offset + a;
                if (r.base.survival(offset) <= 0.0) return point_mass_at_zero();
                return generic(r.base, offset);
            },
        },
        state_->law);
}

double Distribution::sample(Rng& rng) const {
    return std::visit(
        Overloaded{
            [&rng](const Exponential& e) { return -std::log(uniform_open(rng)) / e.rate; },
            [&rng](const Uniform& u) { return u.lo + (u.hi - u.lo) * uniform_open(rng); },
            [&rng](const Gamma& g) { return std::gamma_distribution<double>(g.shape, g.scale)(rng); },
            [](const Deterministic& d) { return d.value; },
            [&rng](const Atoms& a) {
                const double u = uniform_open(rng);
                auto it = std::lower_bound(a.cum.begin(), a.cum.end(), u);
                if (it == a.cum.end()) --it;
                return a.values[static_cast<std::size_t>(it - a.cum.begin())];
            },
            [&rng](const Mixture& m) {
                const double u = uniform_open(rng);
                auto it = std::lower_bound(m.cum.begin(), m.cum.end(), u);
                if (it == m.cum.end()) --it;
                return m.components[static_cast<std::size_t>(it - m.cum.begin())].sample(rng);
            },
            [&rng](const Residual& r) {
                // Inverse transform: solve S_base(s + offset) = u * S_base(offset).
                const double target = uniform_open(rng) * r.base_survival;
                double lo = 0.0;
                double hi = std::max(1.0, r.base.mean());
                while (r.base.survival(hi + r.offset) > target) {
                    lo = hi;
                    hi *= 2.0;
                }
                for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (r.base.survival(mid + r.offset) > target) lo = mid; else hi = mid;
                }
                return 0.5 * (lo + hi);
            },
        },
        state_->law);
}

SupportDescriptor Distribution::support() const {
    return std::visit(
        Overloaded{
            [](const Exponential&) { return SupportDescriptor{{}, {{0.0, kInf}}}; },
            [](const Uniform& u) { return SupportDescriptor{{}, {{u.lo, u.hi}}}; },
            [](const Gamma&) { return SupportDescriptor{{}, {{0.0, kInf}}}; },
            [](const Deterministic& d) { return SupportDescriptor{{d.value}, {}}; },
            [](const Atoms& a) { return SupportDescriptor{a.values, {}}; },
            [](const Mixture& m) {
                std::vector<SupportDescriptor> parts;
                for (const auto& c : m.components) parts.push_back(c.support());
                return merge_supports(parts);
            },
            [](const Residual& r) {
                SupportDescriptor base = r.base.support();
                SupportDescriptor out;
                for (double v : base.atoms)
                    if (v > r.offset) out.atoms.push_back(v - r.offset);
                for (const auto& iv : base.continuous_intervals)
                    if (iv.hi > r.offset) out.continuous_intervals.push_back({std::max(iv.lo - r.offset, 0.0), iv.hi - r.offset});
                return out;
            },
        },
        state_->law);
}

// -------------------------------------------------------------------------
// Support diagnostics

SupportDescriptor merge_supports(std::span<const SupportDescriptor> parts) {
    SupportDescriptor out;
    for (const auto& p : parts) {
        out.atoms.insert(out.atoms.end(), p.atoms.begin(), p.atoms.end());
        out.continuous_intervals.insert(out.continuous_intervals.end(), p.continuous_intervals.begin(),
                                        p.continuous_intervals.end());
    }
    std::sort(out.atoms.begin(), out.atoms.end());
    out.atoms.erase(std::unique(out.atoms.begin(), out.atoms.end()), out.atoms.end());
    return out;
}

namespace {

// Euclid on reals; remainders within tol of 0 or of the divisor count as exact.
double real_gcd(double x, double y, double tol) {
    x = std::abs(x);
    y = std::abs(y);
    if (x < y) std::swap(x, y);
    while (y > tol) {
        double r = std::fmod(x, y);
        if (y - r <= tol) r = 0.0;
        x = y;
        y = r;
    }
    return x;
}

}  // namespace

std::optional<LatticeSpan> lattice_span(const SupportDescriptor& support) {
    for (const auto& iv : support.continuous_intervals)
        if (iv.hi > iv.lo) return std::nullopt;

    std::vector<double> atoms;
    for (double v : support.atoms)
        if (v > 0.0) atoms.push_back(v);
    if (atoms.empty()) return std::nullopt;

    const double largest = *std::max_element(atoms.begin(), atoms.end());
    const double tol = kLatticeTolerance * std::max(1.0, largest);
    double span = atoms.front();
    for (std::size_t i = 1; i < atoms.size(); ++i) span = real_gcd(span, atoms[i], tol);

    if (span < largest / kMaxLatticeMultiplier) return std::nullopt;
    for (double v : atoms) {
        const double k = std::round(v / span);
        if (std::abs(v - k * span) > kLatticeTolerance * std::max(1.0, v)) return std::nullopt;
    }
    return LatticeSpan{0.0, span};
}

bool common_support_nonlattice(std::span<const Distribution> laws) {
    if (laws.empty()) throw Error(ErrorCode::InvalidArgument, "common_support_nonlattice needs at least one law");
    std::vector<SupportDescriptor> parts;
    parts.reserve(laws.size());
    for (const auto& d : laws) parts.push_back(d.support());
    return !lattice_span(merge_supports(parts)).has_value();
}

double dri_gap(const std::function<double(double)>& f, double delta, double t_max) {
    if (!(delta > 0.0) || !(t_max > 0.0))
        throw Error(ErrorCode::InvalidArgument, "dri_gap requires delta > 0 and t_max > 0");
    constexpr int kSamples = 32;
    const auto cells = static_cast<long>(std::ceil(t_max / delta - 1e-12));
    double gap = 0.0;
    for (long n = 1; n <= cells; ++n) {
        const double lo = delta * static_cast<double>(n - 1);
        const double hi = delta * static_cast<double>(n);
        double sup = -kInf;
        double inf = kInf;
        for (int j = 0; j < kSamples; ++j) {
            const double x = j == 0 ? lo : (j == kSamples - 1 ? hi : lo + (hi - lo) * j / (kSamples - 1.0));
            const double v = f(x);
            if (!std::isfinite(v) || v < 0.0)
                throw Error(ErrorCode::NonFinite, "dri_gap integrand is negative or non-finite at x=" + fmt_num(x));
            sup = std::max(sup, v);
            inf = std::min(inf, v);
        }
        gap += sup - inf;
    }
    return delta * gap;
}

}  // namespace lwp
