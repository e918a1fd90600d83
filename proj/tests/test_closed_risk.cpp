// Closed-form risks of the expanded plug-in densities: identity, affine, and
// nonnegative-truncated means, plus the KL plug-in risk helper.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vexp/closed_risk.hpp"
#include "vexp/divergence.hpp"

using Catch::Approx;
using namespace vexp;

TEST_CASE("identity plug-in risk", "[closed-risk]") {
    SECTION("no expansion, alpha = 0, matches the direct formula") {
        const Model m{2, 1.0, 1.0};
        // 4 (1 - (1 + r(1-alpha^2)/4)^(-d/2) ... ) with c = 1: bc = 2, a1 = 1
        const double expected = 4.0 * (1.0 - 1.0 / (1.0 + 1.0 / 4.0));
        REQUIRE(risk_identity(m, 1.0, AlphaLoss{0.0}) == Approx(expected).epsilon(1e-14));
    }

    SECTION("c_opt minimizes over the expansion factor") {
        const Model m{3, 2.0, 1.0};
        for (const double alpha : {-1.0, -0.5, 0.0, 0.5}) {
            const AlphaLoss loss{alpha};
            const double copt = c_opt(m, loss);
            REQUIRE(copt == Approx(std::sqrt(1.0 + m.r() * (1.0 - alpha) / 2.0)).epsilon(1e-14));
            const double mse = m.d * m.sigma_x2;
            const auto risk_at = [&](double c) {
                return loss.is_kl() ? risk_kl_plugin(m, mse, c) : risk_identity(m, c, loss);
            };
            const double at_opt = risk_at(copt);
            const double h = 1e-3;
            REQUIRE(at_opt < risk_at(copt * (1.0 + h)));
            REQUIRE(at_opt < risk_at(copt * (1.0 - h)));
            REQUIRE(at_opt < risk_at(1.0));
        }
    }

    SECTION("risk ratio: formula value and invariance in sigma scale") {
        const Model m{2, 9.6568, 1.0};
        const AlphaLoss hell{0.0};
        const double r = m.r();
        const double expected = (1.0 - std::pow(1.0 + r / 4.0, -1.0)) /
                                (1.0 - std::pow(1.0 + r / 2.0, -0.5));
        REQUIRE(risk_ratio_identity(m, hell) == Approx(expected).epsilon(1e-13));
        REQUIRE(risk_ratio_identity(m, hell) > 1.0);
        // depends on the model only through d and r
        const Model scaled{2, 9.6568 * 7.0, 7.0};
        REQUIRE(risk_ratio_identity(scaled, hell) ==
                Approx(risk_ratio_identity(m, hell)).epsilon(1e-13));
    }

    SECTION("KL endpoint is served by the plug-in formula, not this branch") {
        const Model m{4, 2.0, 1.5};
        REQUIRE_THROWS_AS(risk_identity(m, 1.0, AlphaLoss{-1.0}), domain_error);
        const double mse = m.d * m.sigma_x2;
        REQUIRE(risk_kl_plugin(m, mse, 1.0) == Approx(0.5 * m.d * m.r()).epsilon(1e-13));
        // continuity: the finite branch approaches the KL value as alpha -> -1
        for (const double c : {1.0, 1.2, 2.0})
            REQUIRE(risk_identity(m, c, AlphaLoss{-1.0 + 1e-7}) ==
                    Approx(risk_kl_plugin(m, mse, c)).margin(1e-5));
    }
}

TEST_CASE("affine plug-in risk", "[closed-risk]") {
    const Model m{3, 1.0, 1.0};

    SECTION("a = 1 collapses to the identity risk at every theta") {
        for (const double alpha : {-0.9, -0.2, 0.5})
            for (const double c : {1.0, 1.3})
                for (const double nt : {0.0, 1.0, 4.0})
                    REQUIRE(risk_affine(m, 1.0, nt, c, AlphaLoss{alpha}) ==
                            Approx(risk_identity(m, c, AlphaLoss{alpha})).epsilon(1e-13));
    }

    SECTION("increasing in ||theta|| for a < 1") {
        const AlphaLoss loss{0.0};
        double prev = -1.0;
        for (const double nt : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            const double v = risk_affine(m, 0.6, nt, 1.1, loss);
            REQUIRE(v > prev);
            prev = v;
        }
    }

    SECTION("alpha -> -1 limit matches the plug-in risk with the affine mse") {
        const double a = 0.7, nt = 2.0, c = 1.25;
        const double mse = a * a * m.d * m.sigma_x2 + (1.0 - a) * (1.0 - a) * nt * nt;
        REQUIRE_THROWS_AS(risk_affine(m, a, nt, c, AlphaLoss{-1.0}), domain_error);
        REQUIRE(risk_affine(m, a, nt, c, AlphaLoss{-1.0 + 1e-7}) ==
                Approx(risk_kl_plugin(m, mse, c)).margin(1e-5));
    }

    SECTION("rejects invalid shrinkage and negative radius") {
        REQUIRE_THROWS_AS(risk_affine(m, 0.0, 1.0, 1.0, AlphaLoss{0.0}), domain_error);
        REQUIRE_THROWS_AS(risk_affine(m, 1.5, 1.0, 1.0, AlphaLoss{0.0}), domain_error);
        REQUIRE_THROWS_AS(risk_affine(m, 0.5, -1.0, 1.0, AlphaLoss{0.0}), domain_error);
    }
}

TEST_CASE("truncated-mean risk (d = 1)", "[closed-risk]") {
    const Model m{1, 1.0, 1.0};

    SECTION("special values agree with the generic evaluation") {
        for (const double alpha : {-0.6, 0.0, 0.5})
            for (const double c : {1.0, 1.15, 1.4}) {
                const AlphaLoss loss{alpha};
                REQUIRE(risk_truncated_at_zero(m, c, loss) ==
                        Approx(risk_truncated(m, 0.0, c, loss)).epsilon(1e-12));
                // far in the positive tail truncation never bites: identity risk
                REQUIRE(risk_truncated_limit_inf(m, c, loss) ==
                        Approx(risk_identity(m, c, loss)).epsilon(1e-12));
                REQUIRE(risk_truncated(m, 30.0, c, loss) ==
                        Approx(risk_truncated_limit_inf(m, c, loss)).epsilon(1e-9));
                // far in the negative tail the estimate is pinned at zero and
                // the divergence saturates at the kernel ceiling
                REQUIRE(risk_truncated(m, -30.0, c, loss) ==
                        Approx(4.0 / (1.0 - alpha * alpha)).epsilon(1e-9));
            }
    }

    SECTION("truncation helps at theta = 0") {
        for (const double alpha : {-0.5, 0.0, 0.5}) {
            const AlphaLoss loss{alpha};
            for (const double c : {1.0, 1.2})
                REQUIRE(risk_truncated(m, 0.0, c, loss) < risk_identity(m, c, loss));
        }
    }

    SECTION("only defined in dimension one, only off the KL endpoint") {
        REQUIRE_THROWS_AS(risk_truncated(Model{2, 1.0, 1.0}, 0.0, 1.0, AlphaLoss{0.0}),
                          domain_error);
        REQUIRE_THROWS_AS(risk_truncated(m, 0.0, 1.0, AlphaLoss{-1.0}), domain_error);
    }
}

TEST_CASE("KL plug-in risk formula", "[closed-risk]") {
    const Model m{3, 1.0, 2.0};
    SECTION("reference values") {
        REQUIRE(risk_kl_plugin(m, 0.0, 1.0) == 0.0);
        REQUIRE(risk_kl_plugin(m, 4.0, 1.0) == Approx(1.0).epsilon(1e-15));
        const double c = 1.5;
        const double expected = 0.5 * 3.0 * (2.0 * std::log(c) + 1.0 / (c * c) - 1.0) +
                                4.0 / (2.0 * c * c * 2.0);
        REQUIRE(risk_kl_plugin(m, 4.0, c) == Approx(expected).epsilon(1e-14));
    }
    SECTION("agrees with the per-point KL loss at fixed squared error") {
        REQUIRE(risk_kl_plugin(m, 4.0, 1.3) == Approx(loss_kl_sq(m, 4.0, 1.3)).epsilon(1e-14));
    }
}
