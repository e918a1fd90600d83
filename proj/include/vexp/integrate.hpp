#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "vexp/errors.hpp"

namespace vexp {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0; // accumulated Richardson estimates
    bool converged = true;       // false if any panel hit the depth cap
    std::size_t evals = 0;

    void merge(const QuadResult& o) {
        value += o.value;
        error_estimate += o.error_estimate;
        converged = converged && o.converged;
        evals += o.evals;
    }
};

namespace detail {

// noise_rate: absolute noise per unit length in the integrand values (used
// when f is itself a numerical result, e.g. an inner quadrature); a panel
// whose Richardson difference is below its own noise level has nothing left
// to resolve.
template <class F>
void simpson_panel(F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, double noise_rate, int depth, QuadResult& out) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    out.evals += 2;
    const double h6 = (b - a) / 12.0;
    const double left = h6 * (fa + 4.0 * flm + fm);
    const double right = h6 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (std::fabs(diff) <= 15.0 * tol + noise_rate * (b - a) || depth <= 0) {
        out.value += left + right + diff / 15.0;
        out.error_estimate += std::fabs(diff) / 15.0;
        if (depth <= 0 && std::fabs(diff) > 15.0 * tol + noise_rate * (b - a))
            out.converged = false;
        return;
    }
    simpson_panel(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, noise_rate, depth - 1, out);
    simpson_panel(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, noise_rate, depth - 1, out);
}

} // namespace detail

// Adaptive Simpson on [a, b] with absolute tolerance.  The standard
// panel-splitting scheme with Richardson correction; depth 40 supports
// interval ratios down to ~1e-12 of the original length.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol = 1e-9, int max_depth = 40,
                     double noise_rate = 0.0) {
    QuadResult out;
    if (a == b) return out;
    if (!(a < b)) throw domain_error("integrate: need a <= b");
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    out.evals = 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    detail::simpson_panel(f, a, m, b, fa, fm, fb, whole, abs_tol, noise_rate, max_depth, out);
    return out;
}

// Adaptive Simpson over a strictly increasing knot sequence: one adaptive
// pass per segment, tolerance divided in proportion to segment length.
// Knots exist to pin down integrands whose mass hides between coarse probe
// points (narrow Gaussian bumps in a wide domain): place them so every bump
// straddles several.
template <class F>
QuadResult integrate_knotted(F&& f, std::span<const double> knots, double abs_tol,
                             int max_depth = 40, double noise_rate = 0.0) {
    if (knots.size() < 2) throw domain_error("integrate_knotted: need at least two knots");
    const double width = knots.back() - knots.front();
    if (!(width > 0.0)) throw domain_error("integrate_knotted: knots must increase");
    QuadResult total;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i] < knots[i + 1]))
            throw domain_error("integrate_knotted: knots must strictly increase");
        const double share = (knots[i + 1] - knots[i]) / width;
        total.merge(integrate(f, knots[i], knots[i + 1], abs_tol * share, max_depth, noise_rate));
    }
    return total;
}

// Iterated 2-D quadrature over knotted axes.  The inner tolerance is
// tightened well below the outer one, and the outer pass is told the inner
// noise level so it does not chase inner-quadrature jitter to the depth cap.
template <class F2>
QuadResult integrate_2d(F2&& f, std::span<const double> x_knots, std::span<const double> y_knots,
                        double abs_tol = 1e-7, int max_depth = 32) {
    if (x_knots.size() < 2 || y_knots.size() < 2)
        throw domain_error("integrate_2d: need at least two knots per axis");
    const double x_width = x_knots.back() - x_knots.front();
    const double inner_tol = abs_tol / (50.0 * std::max(1.0, x_width));
    bool inner_ok = true;
    std::size_t inner_evals = 0;
    auto outer = [&](double x) {
        QuadResult inner =
            integrate_knotted([&](double y) { return f(x, y); }, y_knots, inner_tol, max_depth);
        inner_ok = inner_ok && inner.converged;
        inner_evals += inner.evals;
        return inner.value;
    };
    QuadResult out = integrate_knotted(outer, x_knots, abs_tol, max_depth, 8.0 * inner_tol);
    out.converged = out.converged && inner_ok;
    out.evals += inner_evals;
    return out;
}

// Knot ladder for Gaussian-type bumps: offsets (in units of the bump scale)
// dense near the centre, coarse in the tails.
inline void append_bump_knots(std::vector<double>& knots, double center, double scale) {
    static constexpr double offsets[] = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0,
                                         5.0, 6.0, 8.0, 10.0, 12.0};
    for (const double o : offsets) {
        knots.push_back(center + o * scale);
        if (o > 0.0) knots.push_back(center - o * scale);
    }
}

// Sort, clip to [lo, hi], deduplicate (relative to the overall width), and
// guarantee the endpoints are present.
inline std::vector<double> finalize_knots(std::vector<double> knots, double lo, double hi) {
    if (!(lo < hi)) throw domain_error("finalize_knots: need lo < hi");
    knots.push_back(lo);
    knots.push_back(hi);
    std::sort(knots.begin(), knots.end());
    std::vector<double> out;
    out.reserve(knots.size());
    const double min_gap = 1e-9 * (hi - lo);
    for (const double k : knots) {
        if (k < lo || k > hi) continue;
        if (out.empty() || k - out.back() > min_gap) out.push_back(k);
    }
    if (out.back() < hi) out.push_back(hi);
    return out;
}

} // namespace vexp
