#pragma once

#include <functional>
#include <span>

namespace lwp::quad {

using Integrand = std::function<double(double)>;

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss–Kronrod on [lo, hi]. Optional interior
/// breakpoints (jump locations of the integrand) seed the initial partition.
Result integrate(const Integrand& f, double lo, double hi, const Options& opts = {},
                 std::span<const double> breakpoints = {});

/// Integral over [lo, +inf) through the map x = lo + u / (1 - u).
Result integrate_to_infinity(const Integrand& f, double lo, const Options& opts = {});

}  // namespace lwp::quad
