#include "lwp/stats.hpp"

#include "lwp/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace lwp {

double two_sided_z(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw Error(ErrorCode::InvalidArgument, "confidence must lie in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * confidence);
}

double binomial_half_width(double p, std::size_t n, double z) {
    if (n == 0) return 0.0;
    return z * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

MeanEstimate estimate_mean(std::span<const double> values) {
    MeanEstimate est;
    est.count = values.size();
    if (values.empty()) return est;
    double sum = 0.0;
    for (double v : values) sum += v;
    est.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - est.mean) * (v - est.mean);
        const double n = static_cast<double>(values.size());
        est.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return est;
}

}  // namespace lwp
