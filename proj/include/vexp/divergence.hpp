#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "vexp/errors.hpp"
#include "vexp/model.hpp"
#include "vexp/special.hpp"

namespace vexp {

// Divergence kernel between density ratios, nonnegative normalization:
//   |alpha| < 1 :  (4/(1-alpha^2)) * ( (1+alpha) z / 2  -  z^((1+alpha)/2)  +  (1-alpha)/2 )
//   alpha = -1 :   z - log z - 1          (Kullback-Leibler limit)
// Zero iff z = 1; decreasing on (0,1), increasing on (1,inf); convex.
inline double h_alpha(double z, const AlphaLoss& loss) {
    loss.validate();
    if (!(z > 0.0) || !std::isfinite(z)) throw domain_error("h_alpha: z must be finite and > 0");
    const double a = loss.alpha;
    if (loss.is_kl()) return z - std::log(z) - 1.0;
    return (4.0 / (1.0 - a * a)) *
           (0.5 * (1.0 + a) * z - std::pow(z, 0.5 * (1.0 + a)) + 0.5 * (1.0 - a));
}

// Ingredients of the closed-form loss of a scale-expanded Gaussian
// predictive density q_{theta_hat, c} ~ N_d(theta_hat, c^2 sigma_y2 I):
//   bc     = (1-alpha) c^2 + (1+alpha)           >= 2, equality iff c = 1
//   gamma0 = 2 sigma_y2 bc / (1-alpha^2)         reflected-normal loss scale
//   a1     = sqrt(2 c^(1-alpha) / bc)            in (0,1], 1 iff c = 1
struct LossKernelParams {
    double bc;
    double gamma0;
    double a1;
};

inline double bc_of(double c, double alpha) {
    return (1.0 - alpha) * c * c + (1.0 + alpha);
}

inline double gamma0_of(double c, double alpha, double sigma_y2) {
    return 2.0 * sigma_y2 * bc_of(c, alpha) / (1.0 - alpha * alpha);
}

inline double a1_of(double c, double alpha) {
    return std::sqrt(2.0 * pow_1ma(c, alpha) / bc_of(c, alpha));
}

inline LossKernelParams loss_kernel_params(double c, double alpha, double sigma_y2) {
    if (!(c > 0.0)) throw domain_error("loss_kernel_params: c must be > 0");
    return {bc_of(c, alpha), gamma0_of(c, alpha, sigma_y2), a1_of(c, alpha)};
}

// Pointwise integrand p * h(q/p) of the divergence, in product form so that
// p = 0 (target tail) and q = 0 (predictive tail) are both well defined:
//   |alpha| < 1 :  (4/(1-a^2)) ( (1+a) q / 2  -  q^((1+a)/2) p^((1-a)/2)  +  (1-a) p / 2 )
//   alpha = -1 :   q - p log(q/p) - p   (p = 0 contributes q; q = 0 diverges)
// Used by quadrature paths; never divides by p.
inline double loss_integrand(double p, double q, const AlphaLoss& loss) {
    const double a = loss.alpha;
    if (loss.is_kl()) {
        if (p <= 0.0) return q;
        if (q <= 0.0) return std::numeric_limits<double>::infinity();
        return q - p * (std::log(q) - std::log(p)) - p;
    }
    double cross = 0.0;
    if (p > 0.0 && q > 0.0)
        cross = std::exp(0.5 * (1.0 + a) * std::log(q) + 0.5 * (1.0 - a) * std::log(p));
    return (4.0 / (1.0 - a * a)) * (0.5 * (1.0 + a) * q - cross + 0.5 * (1.0 - a) * p);
}

inline double sqdist(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double t = u[i] - v[i];
        s += t * t;
    }
    return s;
}

// alpha-divergence loss of q_{theta_hat, c} against the N_d(theta, sigma_y2 I)
// target, as a function of the squared estimation error m2 = ||theta_hat - theta||^2:
//
//   (4/(1-alpha^2)) (1 - a1^d exp(-m2 / (2 gamma0)))
//
// Requires |alpha| < 1; the alpha = -1 limit is loss_kl below.
inline double loss_closed_sq(const Model& model, double m2, double c, const AlphaLoss& loss) {
    loss.validate();
    if (loss.is_kl())
        throw domain_error("loss_closed: alpha = -1 has no finite kernel branch; use loss_kl");
    if (!(c > 0.0)) throw domain_error("loss_closed: c must be > 0");
    if (!(m2 >= 0.0)) throw domain_error("loss_closed: squared distance must be >= 0");
    const double a = loss.alpha;
    const LossKernelParams kp = loss_kernel_params(c, a, model.sigma_y2);
    const double att = std::pow(kp.a1, model.d) * exp_neg(m2 / (2.0 * kp.gamma0));
    return (4.0 / (1.0 - a * a)) * (1.0 - att);
}

inline double loss_closed(const Model& model, std::span<const double> theta_hat,
                          std::span<const double> theta, double c, const AlphaLoss& loss) {
    if (theta_hat.size() != static_cast<std::size_t>(model.d) || theta.size() != theta_hat.size())
        throw domain_error("loss_closed: point dimensions must match model.d");
    return loss_closed_sq(model, sqdist(theta_hat, theta), c, loss);
}

// Kullback-Leibler divergence of N_d(theta_hat, c^2 sigma_y2 I) from the
// target N_d(theta, sigma_y2 I); the alpha -> -1 limit of loss_closed.
inline double loss_kl_sq(const Model& model, double m2, double c) {
    if (!(c > 0.0)) throw domain_error("loss_kl: c must be > 0");
    if (!(m2 >= 0.0)) throw domain_error("loss_kl: squared distance must be >= 0");
    const double c2 = c * c;
    return 0.5 * model.d * (2.0 * std::log(c) + 1.0 / c2 - 1.0) + m2 / (2.0 * c2 * model.sigma_y2);
}

inline double loss_kl(const Model& model, std::span<const double> theta_hat,
                      std::span<const double> theta, double c) {
    if (theta_hat.size() != static_cast<std::size_t>(model.d) || theta.size() != theta_hat.size())
        throw domain_error("loss_kl: point dimensions must match model.d");
    return loss_kl_sq(model, sqdist(theta_hat, theta), c);
}

} // namespace vexp
