#pragma once

#include <cmath>

namespace vexp {

inline constexpr double sqrt2 = 1.4142135623730950488;
inline constexpr double inv_sqrt_2pi = 0.3989422804014326779;

// Standard normal CDF via the complementary error function.
// Absolute error <= 1e-15 over the whole real line, including far tails,
// because erfc avoids the cancellation of 1 - Phi(-x).
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / sqrt2);
}

inline double norm_pdf(double x) {
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// exp(-x) with the documented underflow policy: x > 745 returns exactly 0.
// Quantities driven by squared distances degrade gracefully to their
// large-separation limits instead of raising FP exceptions.
inline double exp_neg(double x) {
    if (x > 745.0) return 0.0;
    return std::exp(-x);
}

// c^(1-alpha) computed as exp((1-alpha) log c): keeps full precision for c
// near 1, where pow can lose digits that the cut-off solvers need.
inline double pow_1ma(double c, double alpha) {
    return std::exp((1.0 - alpha) * std::log(c));
}

} // namespace vexp
