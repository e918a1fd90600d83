#pragma once

#include <cmath>
#include <string>

#include "vexp/closed_risk.hpp"
#include "vexp/divergence.hpp"
#include "vexp/errors.hpp"
#include "vexp/model.hpp"
#include "vexp/root_find.hpp"
#include "vexp/special.hpp"

namespace vexp {

// A solved dominance cut-off.  Both unit conventions are always populated
// (c_star in c, c2_star = c_star^2) because different results are naturally
// stated in different units; keeping both prevents unit confusion downstream.
struct CutoffResult {
    double c_star = 1.0;
    double c2_star = 1.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double residual = 0.0; // |equation value at c_star|; 0 by construction for closed forms
    std::string method;
};

struct TauParams {
    double epsilon;   // damped-moment infimum, Z measured in sigma_y2 units
    double tau;       // (1-alpha) epsilon - 2 alpha d
    double tau_lower; // (1-alpha) b0 exp(-(1-alpha^2) b2/(8 b1)) - 2 alpha d
};

// Exact KL dominance threshold given the normalized quadratic risk infimum
// r_bar = inf E||theta_hat - theta||^2 / (d sigma_y2).  The KL risk gap of
// the expansion kappa = c^2 over the plug-in is, at the least favourable
// theta, (d/2) [ log kappa + (1 + r_bar)(1/kappa - 1) ]; the threshold is the
// root in kappa of (1 - 1/kappa) t - log kappa = 0 with t = 1 + r_bar, so the
// solved variable is in c^2 units.  g(t) = t - 1 - log t > 0 and
// g(t e^t) = -e^(-t) - log t < 0 bracket it.
inline CutoffResult cutoff_kl_exact(double r_bar, double tol = 1e-13) {
    if (!(r_bar > 0.0)) throw domain_error("cutoff_kl_exact: need r_bar > 0");
    const double t = 1.0 + r_bar;
    auto g = [&](double kappa) { return (1.0 - 1.0 / kappa) * t - std::log(kappa); };
    const double hi = t * std::exp(t);
    RootResult rr = find_root(g, t, hi, tol);
    return {std::sqrt(rr.root), rr.root, t, hi, rr.residual, "kl-exact"};
}

// Largest expansion c (in c units) whose risk improves on the plug-in for the
// affine estimator aX: the unique root in (1, inf) of
//   2(1-alpha) c^2 - (4 + (1-alpha^2) a^2 r) c^(1-alpha) + (1+alpha)(2 + (1-alpha) a^2 r) = 0.
// c = 1 is always a root too, and the function is negative between the two
// roots, so the bracket starts just above 1 (offset scaled to stay below the
// sought root even as it collapses to 1 when a^2 r -> 0).  At alpha = -1 the
// equation degenerates to 0 = 0; its alpha -> -1 limit is exactly the
// kl-exact equation with r_bar = a^2 r (the estimator's normalized quadratic
// risk at theta = 0, its least favourable point), so that branch delegates.
inline CutoffResult cutoff_affine(double a_est, double r, const AlphaLoss& loss,
                                  double tol = 1e-12) {
    loss.validate();
    if (!(a_est > 0.0 && a_est <= 1.0)) throw domain_error("cutoff_affine: need 0 < a <= 1");
    if (!(r > 0.0)) throw domain_error("cutoff_affine: need r > 0");
    const double a = loss.alpha;
    const double a2r = a_est * a_est * r;
    if (loss.is_kl()) {
        CutoffResult res = cutoff_kl_exact(a2r, tol);
        res.method = "affine-kl-exact";
        return res;
    }
    auto F = [&](double c) {
        return 2.0 * (1.0 - a) * c * c - (4.0 + (1.0 - a * a) * a2r) * pow_1ma(c, a) +
               (1.0 + a) * (2.0 + (1.0 - a) * a2r);
    };
    const double lo = 1.0 + std::min(1e-8, a2r * (1.0 - a) / 64.0);
    const double hi = expand_bracket_right(F, lo, 1.0 + std::max(1.0, a2r));
    RootResult rr = find_root(F, lo, hi, tol);
    return {rr.root, rr.root * rr.root, lo, hi, rr.residual, "affine-equation"};
}

// Cut-off for the nonnegative-mean truncated estimator max(X, 0), d = 1:
// the root in c in (1, inf) of A2(c) = (1 + r (1-alpha^2)/4)^(-1/2).
// gamma1 depends on (alpha, c, r) only, so the cut-off is a function of
// (alpha, r) alone.  c = 1 solves the equation as well and the residual
// function is positive between the two roots.
inline CutoffResult cutoff_truncated(double r, const AlphaLoss& loss, double tol = 1e-12) {
    detail::require_finite_alpha(loss, "cutoff_truncated");
    if (!(r > 0.0)) throw domain_error("cutoff_truncated: need r > 0");
    const double a = loss.alpha;
    const double rho = (1.0 - a * a) * r;
    const double rhs = 1.0 / std::sqrt(1.0 + rho / 4.0);
    auto g = [&](double c) {
        const double b = bc_of(c, a);
        const double g1 = std::sqrt(2.0 * b / (2.0 * b + rho));
        return -1.0 + a1_of(c, a) * (1.0 + g1) - rhs;
    };
    const double lo = 1.0 + std::min(1e-8, rho / 1024.0);
    const double hi = expand_bracket_right(g, lo, 2.0);
    RootResult rr = find_root(g, lo, hi, tol);
    return {rr.root, rr.root * rr.root, lo, hi, rr.residual, "truncated-equation"};
}

inline double tau_of(int d, const AlphaLoss& loss, double epsilon) {
    return (1.0 - loss.alpha) * epsilon - 2.0 * loss.alpha * d;
}

// Sufficient dominance cut-off for a general non-degenerate estimator, from
// the damped-moment infimum epsilon > 0.  Returned in c^2 units (c2_star = k,
// the expansion dominates whenever 1 < c^2 <= k); c_star = sqrt(k).
//
//   |alpha| < 1:  k = (tau + sqrt(tau^2 + 4 d^2 (1-alpha^2))) / (2 d (1-alpha))
//   alpha = -1:   k = 1 + epsilon/d   (algebraic limit; avoids 1-alpha^2 = 0 artifacts)
inline CutoffResult cutoff_general(int d, const AlphaLoss& loss, double epsilon) {
    loss.validate();
    if (d < 1) throw domain_error("cutoff_general: d must be >= 1");
    if (!(epsilon > 0.0))
        throw inapplicable_error("cutoff_general: requires epsilon > 0 (epsilon = " +
                                 std::to_string(epsilon) + "); dominance result not applicable");
    double k;
    const char* method;
    if (loss.is_kl()) {
        k = 1.0 + epsilon / d;
        method = "general-kl-limit";
    } else {
        const double a = loss.alpha;
        const double tau = tau_of(d, loss, epsilon);
        k = (tau + std::sqrt(tau * tau + 4.0 * d * d * (1.0 - a * a))) / (2.0 * d * (1.0 - a));
        method = "general-formula";
    }
    const double c = std::sqrt(k);
    return {c, k, c, c, 0.0, method};
}

// Lower bound on cutoff_general built from moment bounds alone:
//   b0 sigma_y2 <= E||theta_hat - theta||^2 <= b1 sigma_y2,  E||theta_hat - theta||^4 <= b2 sigma_y4.
// Same formula with tau replaced by tau_lower; in c^2 units.
inline CutoffResult cutoff_general_lower_bound(int d, const AlphaLoss& loss, double b0, double b1,
                                               double b2) {
    loss.validate();
    if (d < 1) throw domain_error("cutoff_general_lower_bound: d must be >= 1");
    if (!(b0 > 0.0) || !(b2 > 0.0)) throw domain_error("cutoff_general_lower_bound: need b0, b2 > 0");
    if (b0 > b1) throw domain_error("cutoff_general_lower_bound: need b0 <= b1");
    const double a = loss.alpha;
    const double eps_lower = b0 * exp_neg((1.0 - a * a) * b2 / (8.0 * b1));
    CutoffResult res = cutoff_general(d, loss, eps_lower);
    res.method = "general-lower-bound";
    return res;
}

} // namespace vexp
