#pragma once

#include <cmath>
#include <string>

#include "vexp/errors.hpp"

namespace vexp {

// Observation/prediction setup: X ~ N_d(theta, sigma_x2 I), Y ~ N_d(theta, sigma_y2 I).
// X is observed, the density of Y is the estimation target.
struct Model {
    int d = 1;
    double sigma_x2 = 1.0;
    double sigma_y2 = 1.0;

    Model() = default;
    Model(int d_, double sx2, double sy2) : d(d_), sigma_x2(sx2), sigma_y2(sy2) { validate(); }

    void validate() const {
        if (d < 1) throw domain_error("Model: d must be >= 1, got " + std::to_string(d));
        if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2))
            throw domain_error("Model: sigma_x2 must be finite and > 0");
        if (!(sigma_y2 > 0.0) || !std::isfinite(sigma_y2))
            throw domain_error("Model: sigma_y2 must be finite and > 0");
    }

    // variance ratio r = sigma_x^2 / sigma_y^2
    double r() const { return sigma_x2 / sigma_y2; }

    double sigma_x() const { return std::sqrt(sigma_x2); }
    double sigma_y() const { return std::sqrt(sigma_y2); }
};

// Divergence index alpha in [-1, 1).  alpha = -1 selects the Kullback-Leibler
// limit branch; alpha in (-1, 1) selects the finite kernel branch.
struct AlphaLoss {
    double alpha = 0.0;

    AlphaLoss() = default;
    explicit AlphaLoss(double a) : alpha(a) { validate(); }

    void validate() const {
        if (!std::isfinite(alpha) || alpha < -1.0 || alpha >= 1.0)
            throw domain_error("AlphaLoss: alpha must lie in [-1, 1), got " + std::to_string(alpha));
    }

    bool is_kl() const { return alpha == -1.0; }
};

} // namespace vexp
