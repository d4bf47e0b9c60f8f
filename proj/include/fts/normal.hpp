#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "fts/errors.hpp"

namespace fts::normal {

/// Standard normal CDF via erfc (no cancellation in either tail).
[[nodiscard]] inline double cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(x), accurate for large x.
[[nodiscard]] inline double survival(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

[[nodiscard]] inline double pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/**
 * @brief Quantile u_p with Phi(u_p) = p.
 *
 * Acklam's rational approximation as a starting point, then Newton steps on
 * the erfc-based CDF until the correction drops below 1e-15.
 */
[[nodiscard]] inline double quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal quantile needs p in (0,1)");
    constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                            1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                            6.680131188771972e+01,  -1.328068155288572e+01};
    constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                            -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                            3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int iter = 0; iter < 8; ++iter) {
        // residual in the tail that keeps relative precision
        const double err = (x < 0.0) ? cdf(x) - p : (1.0 - p) - survival(x);
        const double step = err / pdf(x);
        x -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

}  // namespace fts::normal
