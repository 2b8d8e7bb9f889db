#include "lwp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace lwp::quad {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the 7-point rule on the odd Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const Integrand& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

Result integrate(const Integrand& f, double lo, double hi, const Options& opts,
                 std::span<const double> breakpoints) {
    if (!(hi > lo)) return {0.0, 0.0, true};

    std::vector<double> cuts{lo};
    for (double b : breakpoints)
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Segment> heap;
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Segment s = gauss_kronrod(f, cuts[i], cuts[i + 1]);
        total += s.value;
        total_error += s.error;
        heap.push(s);
    }

    int intervals = static_cast<int>(heap.size());
    while (total_error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
           intervals < opts.max_intervals) {
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) break;
        heap.pop();
        Segment left = gauss_kronrod(f, worst.lo, mid);
        Segment right = gauss_kronrod(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }

    // Re-sum to shed the drift accumulated by incremental updates.
    total = 0.0;
    total_error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        total_error += heap.top().error;
        heap.pop();
    }
    const bool ok = std::isfinite(total) &&
                    total_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) * 10.0;
    return {total, total_error, ok};
}

Result integrate_to_infinity(const Integrand& f, double lo, const Options& opts) {
    auto mapped = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double one_minus = 1.0 - u;
        const double x = lo + u / one_minus;
        if (!std::isfinite(x)) return 0.0;
        return f(x) / (one_minus * one_minus);
    };
    Result r = integrate(mapped, 0.0, 1.0, opts);
    // Relative error control cannot see divergence (the total just grows), so
    // require x f(x) to have decayed far out.
    const double far = lo + 1e12 * std::max(1.0, std::abs(lo));
    if (std::abs(far * f(far)) > 1e-6 * std::max(1.0, std::abs(f(lo)))) r.converged = false;
    return r;
}

}  // namespace lwp::quad
