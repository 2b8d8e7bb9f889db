#include "lwp/renewal.hpp"

#include "lwp/error.hpp"
#include "lwp/quadrature.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <string>

namespace lwp {

// -------------------------------------------------------------------------
// Simulation

RenewalTrajectory simulate_renewal(const std::optional<Distribution>& first_delay, const Distribution& cycle,
                                   double horizon, Rng& rng) {
    if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    if (cycle.is_point_mass_at_zero() || cycle.cdf(0.0) > 0.0)
        throw Error(ErrorCode::AtomAtZero, "cycle law " + cycle.describe() + " has mass at 0");
    if (first_delay && first_delay->cdf(0.0) > 0.0 && !first_delay->is_point_mass_at_zero())
        throw Error(ErrorCode::AtomAtZero, "first delay law has mass at 0");

    RenewalTrajectory traj{{}, horizon, first_delay, cycle};
    double t = first_delay ? first_delay->sample(rng) : cycle.sample(rng);
    traj.jump_times.push_back(t);
    while (t <= horizon) {
        t += cycle.sample(rng);
        traj.jump_times.push_back(t);
    }
    return traj;
}

OverUnder observe_over_under(const RenewalTrajectory& trajectory, double t) {
    const auto& jumps = trajectory.jump_times;
    const auto it = std::upper_bound(jumps.begin(), jumps.end(), t + kJumpTieTolerance);
    if (it == jumps.end())
        throw Error(ErrorCode::OutOfRange, "t=" + std::to_string(t) + " lies past the simulated trajectory");
    const double last = it == jumps.begin() ? 0.0 : *(it - 1);
    return {std::max(t - last, 0.0), *it - t};
}

void sample_over_under(const Distribution& cycle, std::span<const double> times, Rng& rng,
                       std::span<OverUnder> out) {
    double last = 0.0;
    double next = cycle.sample(rng);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        while (next <= t + kJumpTieTolerance) {
            last = next;
            next += cycle.sample(rng);
        }
        out[i] = {std::max(t - last, 0.0), next - t};
    }
}

// -------------------------------------------------------------------------
// Renewal function

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Real linear convolution by a fixed kernel, reusing FFTW plans.
class Convolver {
public:
    Convolver(std::span<const double> kernel, std::size_t out_len) : out_len_(out_len) {
        n_ = 1;
        while (n_ < kernel.size() + out_len) n_ <<= 1;
        spectrum_len_ = n_ / 2 + 1;
        real_ = fftw_alloc_real(n_);
        buf_ = fftw_alloc_complex(spectrum_len_);
        kernel_hat_.resize(spectrum_len_);
        {
            std::lock_guard lock(fftw_planner_mutex());
            forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, buf_, FFTW_ESTIMATE);
            backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), buf_, real_, FFTW_ESTIMATE);
        }
        std::fill(real_, real_ + n_, 0.0);
        std::copy(kernel.begin(), kernel.end(), real_);
        fftw_execute(forward_);
        for (std::size_t k = 0; k < spectrum_len_; ++k) kernel_hat_[k] = {buf_[k][0], buf_[k][1]};
    }

    Convolver(const Convolver&) = delete;
    Convolver& operator=(const Convolver&) = delete;

    ~Convolver() {
        {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(forward_);
            fftw_destroy_plan(backward_);
        }
        fftw_free(real_);
        fftw_free(buf_);
    }

    /// out[j] = sum_i kernel[i] * in[j - i] for j < out_len.
    void apply(std::span<const double> in, std::span<double> out) {
        std::fill(real_, real_ + n_, 0.0);
        std::copy(in.begin(), in.end(), real_);
        fftw_execute(forward_);
        for (std::size_t k = 0; k < spectrum_len_; ++k) {
            const std::complex<double> v = std::complex<double>(buf_[k][0], buf_[k][1]) * kernel_hat_[k];
            buf_[k][0] = v.real();
            buf_[k][1] = v.imag();
        }
        fftw_execute(backward_);
        const double scale = 1.0 / static_cast<double>(n_);
        for (std::size_t j = 0; j < out_len_; ++j) out[j] = real_[j] * scale;
    }

private:
    std::size_t n_ = 0;
    std::size_t spectrum_len_ = 0;
    std::size_t out_len_ = 0;
    double* real_ = nullptr;
    fftw_complex* buf_ = nullptr;
    std::vector<std::complex<double>> kernel_hat_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

}  // namespace

RenewalFunctionTable::RenewalFunctionTable(Distribution cycle, double step, std::vector<double> values,
                                           int truncation_m)
    : cycle_(std::move(cycle)), step_(step), values_(std::move(values)), truncation_m_(truncation_m) {
    for (std::size_t j = 1; j < values_.size(); ++j)
        discretization_bound_ = std::max(discretization_bound_, values_[j] - values_[j - 1]);
}

double RenewalFunctionTable::renewal_equation_residual() const {
    const std::size_t n = values_.size();
    std::vector<double> cdf(n);
    for (std::size_t j = 0; j < n; ++j) cdf[j] = cycle_.cdf(step_ * static_cast<double>(j));
    std::vector<double> mass(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) mass[i] = cdf[i] - cdf[i - 1];
    std::vector<double> conv(n);
    Convolver(mass, n).apply(values_, conv);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(values_[j] - cdf[j] - conv[j]));
    return worst;
}

double RenewalFunctionTable::at(double t) const {
    if (t <= 0.0) return 0.0;
    const double pos = t / step_;
    const auto last = static_cast<double>(values_.size() - 1);
    if (pos > last * (1.0 + 1e-12) + 1e-9)
        throw Error(ErrorCode::OutOfRange, "t=" + std::to_string(t) + " exceeds table range " + std::to_string(t_max()));
    if (pos >= last) return values_.back();
    const auto j = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(j);
    return values_[j] + frac * (values_[j + 1] - values_[j]);
}

double RenewalFunctionTable::stieltjes(const std::function<double(double)>& g, double t) const {
    if (t < 0.0) throw Error(ErrorCode::OutOfRange, "negative integration limit");
    const double pos = t / step_;
    const auto last = static_cast<double>(values_.size() - 1);
    if (pos > last * (1.0 + 1e-12) + 1e-9)
        throw Error(ErrorCode::OutOfRange, "t=" + std::to_string(t) + " exceeds table range " + std::to_string(t_max()));

    // Full cells, then the partial cell ending at t.
    auto full = static_cast<std::size_t>(std::floor(pos + 1e-9));
    full = std::min(full, values_.size() - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < full; ++j) {
        const double dh = values_[j + 1] - values_[j];
        if (dh != 0.0) acc += g(step_ * (static_cast<double>(j) + 0.5)) * dh;
    }
    const double edge = step_ * static_cast<double>(full);
    if (t > edge) {
        const double dh = at(t) - values_[full];
        if (dh != 0.0) acc += g(0.5 * (edge + t)) * dh;
    }
    return acc;
}

RenewalFunctionTable renewal_function(const Distribution& cycle, double t_max, double step) {
    if (!std::isfinite(cycle.mean())) throw Error(ErrorCode::InfiniteMean, cycle.describe() + " has no finite mean");
    if (cycle.is_point_mass_at_zero() || cycle.cdf(0.0) > 0.0)
        throw Error(ErrorCode::AtomAtZero, "cycle law " + cycle.describe() + " has mass at 0");
    if (step <= 0.0) step = cycle.mean() / 1000.0;
    if (!(t_max >= step)) throw Error(ErrorCode::InvalidArgument, "t_max must be at least one grid step");

    const auto cells = static_cast<std::size_t>(std::ceil(t_max / step - 1e-9));
    const std::size_t n = cells + 1;

    std::vector<double> cdf(n);
    for (std::size_t j = 0; j < n; ++j) cdf[j] = cycle.cdf(step * static_cast<double>(j));
    std::vector<double> mass(n, 0.0);  // mass[i]: F-mass of cell ((i-1)h, ih]
    for (std::size_t i = 1; i < n; ++i) mass[i] = cdf[i] - cdf[i - 1];

    Convolver conv(mass, n);
    std::vector<double> h = cdf;
    std::vector<double> power = cdf;
    std::vector<double> mid(cells);
    std::vector<double> next(n);

    int m = 1;
    for (;;) {
        // next_j = sum_i mass_i * (power_{j-i} + power_{j-i+1}) / 2
        for (std::size_t l = 0; l < cells; ++l) mid[l] = 0.5 * (power[l] + power[l + 1]);
        conv.apply(mid, next);
        next[0] = 0.0;  // mass[0] is 0
        double peak = 0.0;
        for (double& v : next) {
            if (v < 0.0) v = 0.0;  // FFT round-off
            peak = std::max(peak, v);
        }
        if (peak < kPowerCutoff) break;
        if (m >= kMaxPowers)
            throw Error(ErrorCode::BudgetExceeded,
                        "renewal function needs more than " + std::to_string(kMaxPowers) + " convolution powers");
        for (std::size_t j = 0; j < n; ++j) h[j] += next[j];
        power.swap(next);
        ++m;
    }
    return RenewalFunctionTable(cycle, step, std::move(h), m);
}

// -------------------------------------------------------------------------
// Key renewal theorem

bool is_lattice(const Distribution& law) { return lattice_span(law.support()).has_value(); }

double key_renewal_integral(const Kernel& b, const RenewalFunctionTable& table, double t) {
    return table.stieltjes([&](double s) { return b(t - s); }, t);
}

double key_renewal_limit(const Kernel& b, const Distribution& cycle) {
    if (is_lattice(cycle))
        throw Error(ErrorCode::LatticeCycle, cycle.describe() + " is lattice; the key renewal limit does not apply");
    const double mean = cycle.mean();
    if (!std::isfinite(mean)) throw Error(ErrorCode::InfiniteMean, cycle.describe() + " has no finite mean");
    const auto res = quad::integrate_to_infinity(b, 0.0);
    if (!res.converged || !std::isfinite(res.value))
        throw Error(ErrorCode::NonFinite, "integral of b over [0, inf) did not converge");
    return res.value / mean;
}

std::vector<ConvergencePoint> key_renewal_convergence(const Kernel& b, const RenewalFunctionTable& table,
                                                      double limit) {
    std::vector<ConvergencePoint> out;
    const double mean = table.cycle_law().mean();
    for (double t = mean; t <= table.t_max() * (1.0 + 1e-12); t *= 2.0) {
        const double v = key_renewal_integral(b, table, t);
        out.push_back({t, v, std::abs(v - limit)});
    }
    return out;
}

double overjump_survival_exact(const Distribution& cycle, const RenewalFunctionTable& table, double s, double t) {
    if (s <= 0.0) return 1.0;
    if (t < 0.0) throw Error(ErrorCode::OutOfRange, "t must be nonnegative");
    const double v =
        cycle.survival(t + s) + table.stieltjes([&](double u) { return cycle.survival(t - u + s); }, t);
    return std::clamp(v, 0.0, 1.0);
}

LimitValue stationary_overjump_survival(const Distribution& cycle, double a) {
    const double total = cycle.tail_integral(0.0);
    const double value = a <= 0.0 ? 1.0 : cycle.tail_integral(a) / total;
    return {value, is_lattice(cycle)};
}

LimitValue stationary_overjump_mean(const Distribution& cycle) {
    const double m2 = cycle.moment(2);
    if (!std::isfinite(m2))
        throw Error(ErrorCode::InfiniteSecondMoment, cycle.describe() + " has no finite second moment");
    return {m2 / (2.0 * cycle.mean()), is_lattice(cycle)};
}

}  // namespace lwp
