#pragma once

#include <cmath>

#include "vexp/divergence.hpp"
#include "vexp/errors.hpp"
#include "vexp/model.hpp"
#include "vexp/special.hpp"

namespace vexp {

namespace detail {
inline void require_finite_alpha(const AlphaLoss& loss, const char* who) {
    loss.validate();
    if (loss.is_kl())
        throw domain_error(std::string(who) + ": alpha = -1 not supported here; use the KL form");
}
} // namespace detail

// Constant frequentist risk of the expanded plug-in q_{X,c}; independent of theta.
inline double risk_identity(const Model& model, double c, const AlphaLoss& loss) {
    detail::require_finite_alpha(loss, "risk_identity");
    if (!(c > 0.0)) throw domain_error("risk_identity: c must be > 0");
    const double a = loss.alpha;
    const double r = model.r();
    const double base =
        4.0 * pow_1ma(c, a) / (2.0 * c * c * (1.0 - a) + 2.0 * (1.0 + a) + (1.0 - a * a) * r);
    return (4.0 / (1.0 - a * a)) * (1.0 - std::pow(base, 0.5 * model.d));
}

// Expansion minimizing risk_identity in c: c_opt = sqrt(1 + r (1-alpha)/2).
// Also valid at the KL endpoint alpha = -1 (giving sqrt(1 + r)).
inline double c_opt(const Model& model, const AlphaLoss& loss) {
    loss.validate();
    return std::sqrt(1.0 + model.r() * (1.0 - loss.alpha) / 2.0);
}

// Risk ratio no-expansion / best-expansion for the identity estimator:
//   (1 - {1 + r(1-alpha^2)/4}^(-d/2)) / (1 - {1 + r(1-alpha)/2}^(-d(1+alpha)/4))
// >= 1; the gain available from optimal variance expansion.
inline double risk_ratio_identity(const Model& model, const AlphaLoss& loss) {
    detail::require_finite_alpha(loss, "risk_ratio_identity");
    const double a = loss.alpha;
    const double r = model.r();
    const double d = model.d;
    const double num = 1.0 - std::pow(1.0 + r * (1.0 - a * a) / 4.0, -0.5 * d);
    const double den = 1.0 - std::pow(1.0 + r * (1.0 - a) / 2.0, -0.25 * d * (1.0 + a));
    return num / den;
}

// Exact risk of the expanded affine plug-in q_{aX,c}, 0 < a <= 1.  Depends on
// theta only through ||theta||; a = 1 collapses to risk_identity for every theta.
inline double risk_affine(const Model& model, double a_est, double norm_theta, double c,
                          const AlphaLoss& loss) {
    detail::require_finite_alpha(loss, "risk_affine");
    if (!(a_est > 0.0 && a_est <= 1.0)) throw domain_error("risk_affine: need 0 < a <= 1");
    if (!(norm_theta >= 0.0)) throw domain_error("risk_affine: ||theta|| must be >= 0");
    if (!(c > 0.0)) throw domain_error("risk_affine: c must be > 0");
    const double a = loss.alpha;
    const double r = model.r();
    const double base = 4.0 * pow_1ma(c, a) /
                        (2.0 * c * c * (1.0 - a) + 2.0 * (1.0 + a) + a_est * a_est * (1.0 - a * a) * r);
    const double g0 = gamma0_of(c, a, model.sigma_y2);
    const double shift = (a_est - 1.0) * (a_est - 1.0) * norm_theta * norm_theta /
                         (2.0 * (g0 + a_est * a_est * model.sigma_x2));
    return (4.0 / (1.0 - a * a)) * (1.0 - std::pow(base, 0.5 * model.d) * exp_neg(shift));
}

// gamma1(c) = sqrt(gamma0 / (gamma0 + sigma_x2)), in (0, 1), increasing in c.
inline double gamma1_of(double c, double alpha, double sigma_x2, double sigma_y2) {
    const double g0 = gamma0_of(c, alpha, sigma_y2);
    return std::sqrt(g0 / (g0 + sigma_x2));
}

// A2(c) = -1 + A1(c) (1 + gamma1(c)); the truncated cut-off equation reads
// A2(c) = (1 + r (1-alpha^2)/4)^(-1/2).
inline double a2_of(double c, double alpha, double sigma_x2, double sigma_y2) {
    return -1.0 + a1_of(c, alpha) * (1.0 + gamma1_of(c, alpha, sigma_x2, sigma_y2));
}

// The two components of G(theta, c) for the nonnegative-mean truncated
// estimator max(X, 0) in dimension 1, and their assembled risk.
struct TruncatedRiskParams {
    double gamma1;
    double a2;
    double g1; // exp(-theta^2 / (2 gamma0)) Phi(-theta / sigma_x)
    double g2; // gamma1 Phi(theta / (gamma1 sigma_x))
};

inline TruncatedRiskParams truncated_risk_params(const Model& model, double theta, double c,
                                                 const AlphaLoss& loss) {
    detail::require_finite_alpha(loss, "risk_truncated");
    if (model.d != 1) throw domain_error("risk_truncated: defined for d = 1 only");
    if (!(c > 0.0)) throw domain_error("risk_truncated: c must be > 0");
    const double a = loss.alpha;
    const double g0 = gamma0_of(c, a, model.sigma_y2);
    const double sx = model.sigma_x();
    const double g1v = gamma1_of(c, a, model.sigma_x2, model.sigma_y2);
    TruncatedRiskParams p;
    p.gamma1 = g1v;
    p.a2 = -1.0 + a1_of(c, a) * (1.0 + g1v);
    p.g1 = exp_neg(theta * theta / (2.0 * g0)) * norm_cdf(-theta / sx);
    p.g2 = g1v * norm_cdf(theta / (g1v * sx));
    return p;
}

// Exact risk of q_{max(X,0), c} (d = 1); valid for negative theta as well.
inline double risk_truncated(const Model& model, double theta, double c, const AlphaLoss& loss) {
    const TruncatedRiskParams p = truncated_risk_params(model, theta, c, loss);
    const double a = loss.alpha;
    return (4.0 / (1.0 - a * a)) * (1.0 - a1_of(c, a) * (p.g1 + p.g2));
}

// Closed special values, exposed directly so callers need not evaluate the
// risk at huge |theta| (Phi tails underflow long before the limit is reached).
inline double risk_truncated_at_zero(const Model& model, double c, const AlphaLoss& loss) {
    const TruncatedRiskParams p = truncated_risk_params(model, 0.0, c, loss);
    const double a = loss.alpha;
    return (4.0 / (1.0 - a * a)) * (1.0 - a1_of(c, a) * 0.5 * (1.0 + p.gamma1));
}

inline double risk_truncated_limit_inf(const Model& model, double c, const AlphaLoss& loss) {
    const TruncatedRiskParams p = truncated_risk_params(model, 0.0, c, loss);
    const double a = loss.alpha;
    return (4.0 / (1.0 - a * a)) * (1.0 - a1_of(c, a) * p.gamma1);
}

// KL risk of an expanded plug-in with mean squared error mse = E||theta_hat - theta||^2:
//   (d/2)(2 ln c + 1/c^2 - 1) + mse / (2 c^2 sigma_y2)
inline double risk_kl_plugin(const Model& model, double mse, double c) {
    if (!(mse >= 0.0)) throw domain_error("risk_kl_plugin: mse must be >= 0");
    if (!(c > 0.0)) throw domain_error("risk_kl_plugin: c must be > 0");
    const double c2 = c * c;
    return 0.5 * model.d * (2.0 * std::log(c) + 1.0 / c2 - 1.0) + mse / (2.0 * c2 * model.sigma_y2);
}

} // namespace vexp
