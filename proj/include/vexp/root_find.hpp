#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "vexp/errors.hpp"

namespace vexp {

struct RootResult {
    double root = 0.0;
    double residual = 0.0; // |f(root)|
    double lo = 0.0;       // final bracket
    double hi = 0.0;
    int iterations = 0;
};

// Bracketed root finder: bisection refined by secant steps.  The bracket
// [a, b] must straddle a sign change; every step keeps a sign-changing
// bracket, so convergence to |b - a| <= tol is guaranteed.  A secant
// candidate is used when it falls safely inside the bracket and the same
// endpoint has not been retained twice in a row (anti-stalling rule);
// otherwise the step is a plain bisection.
template <class F>
RootResult find_root(F&& f, double a, double b, double tol = 1e-12, int max_iter = 200) {
    if (!(a < b)) throw solver_error("find_root: need a < b");
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, 0.0, a, b, 0};
    if (fb == 0.0) return {b, 0.0, a, b, 0};
    if ((fa > 0.0) == (fb > 0.0))
        throw solver_error("find_root: no sign change on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "] (f: " + std::to_string(fa) + ", " +
                           std::to_string(fb) + ")");
    int stall = 0; // +n: 'a' retained n times in a row, -n: 'b' retained
    int it = 0;
    while (b - a > tol && it < max_iter) {
        ++it;
        double x;
        const double mid = 0.5 * (a + b);
        const double denom = fb - fa;
        const double guard = 0.01 * (b - a);
        if (denom != 0.0 && stall > -2 && stall < 2) {
            x = b - fb * (b - a) / denom; // secant through the bracket endpoints
            if (!(x > a + guard && x < b - guard)) x = mid;
        } else {
            x = mid;
        }
        const double fx = f(x);
        if (fx == 0.0) return {x, 0.0, a, b, it};
        if ((fx > 0.0) == (fa > 0.0)) {
            a = x;
            fa = fx;
            stall = stall < 0 ? stall - 1 : -1; // 'b' retained again / first time
        } else {
            b = x;
            fb = fx;
            stall = stall > 0 ? stall + 1 : 1; // 'a' retained again / first time
        }
    }
    const double root = std::fabs(fa) <= std::fabs(fb) ? a : b;
    return {root, std::fabs(f(root)), a, b, it};
}

// Expand [lo, hi0] to the right until f changes sign relative to f(lo):
// hi <- 2 hi, capped at hi_cap.  Returns the located hi.
template <class F>
double expand_bracket_right(F&& f, double lo, double hi0, double hi_cap = 1e6) {
    const double flo = f(lo);
    if (flo == 0.0) return lo;
    double hi = hi0;
    while (hi <= hi_cap) {
        const double fhi = f(hi);
        if (fhi == 0.0 || (fhi > 0.0) != (flo > 0.0)) return hi;
        hi *= 2.0;
    }
    throw solver_error("expand_bracket_right: no sign change located up to hi = " +
                       std::to_string(hi_cap));
}

// Golden-section maximizer on [a, b] for a unimodal f; tol is on x.
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol = 1e-8) {
    constexpr double invphi = 0.6180339887498948482;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

} // namespace vexp
