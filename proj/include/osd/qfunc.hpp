#pragma once

// Gaussian tail probability Q(x) and its logarithm.

#include <cmath>
#include <numbers>

namespace osd {

/// Q(x) = P(N(0,1) > x). Relative error well under 1e-12 for |x| <= 8.
inline double q_function(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

/// log Q(x), usable far into the tail where Q underflows.
inline double log_q_function(double x) {
    if (x < 30.0) return std::log(q_function(x));
    // asymptotic expansion Q(x) ~ phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6)
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

}  // namespace osd
