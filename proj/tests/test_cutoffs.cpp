// Dominance cut-off solvers: affine, truncated, general (damped-moment based),
// and the exact KL threshold.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vexp/closed_risk.hpp"
#include "vexp/cutoffs.hpp"

using Catch::Approx;
using namespace vexp;

TEST_CASE("affine cut-off", "[cutoffs]") {
    SECTION("alpha = 0 closed form c* = 1 + a^2 r / 2") {
        for (const double a_est : {0.4, 0.75, 1.0})
            for (const double r : {0.3, 1.0, 4.0}) {
                const auto res = cutoff_affine(a_est, r, AlphaLoss{0.0});
                REQUIRE(res.c_star == Approx(1.0 + a_est * a_est * r / 2.0).margin(1e-10));
                REQUIRE(res.c2_star == Approx(res.c_star * res.c_star).epsilon(1e-14));
                REQUIRE(res.method == "affine-equation");
                REQUIRE(res.residual < 1e-9);
            }
    }

    SECTION("solution satisfies the defining equation across alpha") {
        for (const double alpha : {-0.9, -0.4, 0.2, 0.8})
            for (const double a_est : {0.5, 1.0})
                for (const double r : {0.5, 2.5}) {
                    const auto res = cutoff_affine(a_est, r, AlphaLoss{alpha});
                    const double c = res.c_star, a2r = a_est * a_est * r;
                    const double F = 2.0 * (1.0 - alpha) * c * c -
                                     (4.0 + (1.0 - alpha * alpha) * a2r) *
                                         std::pow(c, 1.0 - alpha) +
                                     (1.0 + alpha) * (2.0 + (1.0 - alpha) * a2r);
                    REQUIRE(c > 1.0);
                    REQUIRE(F == Approx(0.0).margin(1e-9));
                    // the cut-off really is a risk crossing: inside improves, outside hurts
                    const Model m{1, r, 1.0};
                    const AlphaLoss loss{alpha};
                    const double base = risk_affine(m, a_est, 0.0, 1.0, loss);
                    REQUIRE(risk_affine(m, a_est, 0.0, 0.5 * (1.0 + c), loss) < base);
                    REQUIRE(risk_affine(m, a_est, 0.0, c * 1.01, loss) > base);
                }
    }

    SECTION("KL endpoint delegates to the exact threshold in a^2 r") {
        const auto res = cutoff_affine(0.8, 2.0, AlphaLoss{-1.0});
        const auto exact = cutoff_kl_exact(0.8 * 0.8 * 2.0);
        REQUIRE(res.c2_star == Approx(exact.c2_star).epsilon(1e-13));
        REQUIRE(res.method == "affine-kl-exact");
        // continuity: the finite-alpha equation approaches the same threshold
        const auto near = cutoff_affine(0.8, 2.0, AlphaLoss{-1.0 + 1e-6});
        REQUIRE(near.c2_star == Approx(res.c2_star).margin(1e-4));
    }

    SECTION("input validation") {
        REQUIRE_THROWS_AS(cutoff_affine(0.0, 1.0, AlphaLoss{0.0}), domain_error);
        REQUIRE_THROWS_AS(cutoff_affine(1.2, 1.0, AlphaLoss{0.0}), domain_error);
        REQUIRE_THROWS_AS(cutoff_affine(0.5, 0.0, AlphaLoss{0.0}), domain_error);
    }
}

TEST_CASE("truncated-mean cut-off", "[cutoffs]") {
    SECTION("root satisfies A2(c) = (1 + r (1-alpha^2)/4)^(-1/2)") {
        for (const double alpha : {-0.6, 0.0, 0.5})
            for (const double r : {0.5, 1.0, 3.0}) {
                const AlphaLoss loss{alpha};
                const auto res = cutoff_truncated(r, loss);
                REQUIRE(res.c_star > 1.0);
                REQUIRE(res.method == "truncated-equation");
                const double rhs = 1.0 / std::sqrt(1.0 + r * (1.0 - alpha * alpha) / 4.0);
                const double lhs = a2_of(res.c_star, alpha, r, 1.0); // sigma_y2 = 1, sigma_x2 = r
                REQUIRE(lhs == Approx(rhs).margin(1e-9));
            }
    }

    SECTION("depends on sigma scales only through r") {
        const AlphaLoss loss{0.2};
        const auto res = cutoff_truncated(2.0, loss);
        // a2_of with (sigma_x2, sigma_y2) = (2k, k) must hit the same rhs
        for (const double k : {0.25, 4.0}) {
            const double lhs = a2_of(res.c_star, 0.2, 2.0 * k, k);
            const double rhs = 1.0 / std::sqrt(1.0 + 2.0 * (1.0 - 0.04) / 4.0);
            REQUIRE(lhs == Approx(rhs).margin(1e-9));
        }
    }

    SECTION("KL endpoint is not covered by this solver") {
        REQUIRE_THROWS_AS(cutoff_truncated(1.0, AlphaLoss{-1.0}), domain_error);
    }
}

TEST_CASE("general damped-moment cut-off", "[cutoffs]") {
    SECTION("closed form satisfies the defining quadratic in k = c^2") {
        for (const int d : {1, 3, 8})
            for (const double alpha : {-0.95, -0.3, 0.0, 0.6})
                for (const double eps : {0.1, 1.0, 7.5}) {
                    const AlphaLoss loss{alpha};
                    const auto res = cutoff_general(d, loss, eps);
                    const double k = res.c2_star;
                    const double tau = (1.0 - alpha) * eps - 2.0 * alpha * d;
                    const double q = d * (1.0 - alpha) * k * k - tau * k - d * (1.0 + alpha);
                    REQUIRE(k > 1.0);
                    REQUIRE(res.c_star == Approx(std::sqrt(k)).epsilon(1e-14));
                    REQUIRE(q == Approx(0.0).margin(1e-9 * std::max(1.0, k * k * d)));
                    REQUIRE(res.method == "general-formula");
                }
    }

    SECTION("KL limit k = 1 + epsilon/d, and continuity from alpha > -1") {
        const auto kl = cutoff_general(3, AlphaLoss{-1.0}, 1.5);
        REQUIRE(kl.c2_star == Approx(1.0 + 1.5 / 3.0).epsilon(1e-14));
        REQUIRE(kl.method == "general-kl-limit");
        const auto near = cutoff_general(3, AlphaLoss{-1.0 + 1e-8}, 1.5);
        REQUIRE(near.c2_star == Approx(kl.c2_star).margin(1e-6));
    }

    SECTION("epsilon <= 0 means the sufficient condition has no content") {
        REQUIRE_THROWS_AS(cutoff_general(2, AlphaLoss{0.0}, 0.0), inapplicable_error);
        REQUIRE_THROWS_AS(cutoff_general(2, AlphaLoss{0.0}, -1.0), inapplicable_error);
    }

    SECTION("moment-bound variant never exceeds the exact-epsilon cut-off") {
        // with b0 = b1 = E Z and b2 >= E Z^2 the damped moment dominates the bound
        const int d = 3;
        const AlphaLoss loss{0.0};
        const double b0 = 2.0, b1 = 2.0, b2 = 6.5; // e.g. Z with mean 2, E Z^2 = 6.5
        const auto lb = cutoff_general_lower_bound(d, loss, b0, b1, b2);
        REQUIRE(lb.method == "general-lower-bound");
        REQUIRE(lb.c2_star > 1.0);
        // exact epsilon is at least the bound, and the cut-off is increasing in epsilon
        const double eps_lower = b0 * std::exp(-(1.0 - 0.0) * b2 / (8.0 * b1));
        const auto same = cutoff_general(d, loss, eps_lower);
        REQUIRE(lb.c2_star == Approx(same.c2_star).epsilon(1e-14));
        REQUIRE(cutoff_general(d, loss, b0).c2_star > lb.c2_star);
    }
}

TEST_CASE("exact KL threshold", "[cutoffs]") {
    SECTION("root of (1 - 1/kappa)(1 + r_bar) = log kappa, in c^2 units") {
        for (const double rb : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const auto res = cutoff_kl_exact(rb);
            const double t = 1.0 + rb;
            const double g = (1.0 - 1.0 / res.c2_star) * t - std::log(res.c2_star);
            REQUIRE(res.c2_star > 1.0);
            REQUIRE(g == Approx(0.0).margin(1e-11));
            REQUIRE(res.c_star == Approx(std::sqrt(res.c2_star)).epsilon(1e-14));
            REQUIRE(res.method == "kl-exact");
            // larger admissible expansion than the sufficient general bound
            REQUIRE(res.c2_star > cutoff_general(1, AlphaLoss{-1.0}, rb).c2_star);
        }
    }

    SECTION("frozen reference value at r_bar = 1") {
        REQUIRE(cutoff_kl_exact(1.0).c2_star == Approx(4.92155363456750509).epsilon(1e-10));
    }

    SECTION("the threshold is where the KL risk gap changes sign") {
        const double rb = 1.0; // identity estimator, r = 1, d = 2
        const Model m{2, 1.0, 1.0};
        const double mse = m.d * m.sigma_x2;
        const auto res = cutoff_kl_exact(rb);
        const double base = risk_kl_plugin(m, mse, 1.0);
        REQUIRE(risk_kl_plugin(m, mse, std::sqrt(res.c2_star * 0.98)) < base);
        REQUIRE(risk_kl_plugin(m, mse, std::sqrt(res.c2_star * 1.02)) > base);
        REQUIRE(risk_kl_plugin(m, mse, res.c_star) == Approx(base).margin(1e-10));
    }

    SECTION("rejects nonpositive normalized risk") {
        REQUIRE_THROWS_AS(cutoff_kl_exact(0.0), domain_error);
    }
}
