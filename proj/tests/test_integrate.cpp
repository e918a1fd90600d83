// Adaptive quadrature: plain, knotted, iterated 2-D, and the mixture-loss
// integrals built on top of it, checked against closed forms.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "vexp/divergence.hpp"
#include "vexp/integrate.hpp"
#include "vexp/mixture.hpp"

using Catch::Approx;
using namespace vexp;

TEST_CASE("adaptive Simpson on a single interval", "[integrate]") {
    SECTION("classic smooth integrals") {
        const auto s = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi,
                                 1e-11);
        REQUIRE(s.converged);
        REQUIRE(s.value == Approx(2.0).margin(1e-10));

        const auto e = integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12);
        REQUIRE(e.value == Approx(std::numbers::e - 1.0).margin(1e-11));
        REQUIRE(e.error_estimate < 1e-10);
    }

    SECTION("cubics are exact up to the Richardson correction") {
        const auto q = integrate([](double x) { return x * x * x; }, 0.0, 1.0, 1e-9);
        REQUIRE(q.value == Approx(0.25).margin(1e-14));
    }

    SECTION("empty interval and bad ordering") {
        const auto z = integrate([](double x) { return x; }, 2.0, 2.0);
        REQUIRE(z.value == 0.0);
        REQUIRE(z.evals == 0);
        REQUIRE_THROWS_AS(integrate([](double x) { return x; }, 2.0, 1.0), domain_error);
    }

    SECTION("depth cap reported through converged") {
        const auto r = integrate([](double x) { return std::sin(10.0 * x); }, 0.0, 1.0,
                                 1e-14, 1);
        REQUIRE_FALSE(r.converged);
    }
}

TEST_CASE("knots pin down narrow bumps", "[integrate]") {
    // A Gaussian of width 1e-3 between coarse probe points: the plain pass
    // sees zero everywhere it looks and stops immediately; the knotted pass
    // straddles the bump by construction.
    const double center = 4.7, scale = 1e-3;
    auto bump = [&](double x) {
        const double z = (x - center) / scale;
        return std::exp(-0.5 * z * z);
    };
    const double mass = scale * std::sqrt(2.0 * std::numbers::pi);

    const auto blind = integrate(bump, 0.0, 10.0, 1e-9);
    REQUIRE(blind.value == 0.0); // the documented failure mode

    std::vector<double> knots;
    append_bump_knots(knots, center, scale);
    const auto grid = finalize_knots(knots, 0.0, 10.0);
    const auto seen = integrate_knotted(bump, grid, 1e-9);
    REQUIRE(seen.converged);
    REQUIRE(seen.value == Approx(mass).epsilon(1e-7));
}

TEST_CASE("knot assembly", "[integrate]") {
    SECTION("finalize sorts, clips, dedupes, and keeps endpoints") {
        std::vector<double> knots{5.0, -2.0, 1.0, 1.0, 1.0 + 1e-15, 3.0, 11.0};
        const auto g = finalize_knots(knots, 0.0, 10.0);
        REQUIRE(g.front() == 0.0);
        REQUIRE(g.back() == 10.0);
        for (std::size_t i = 0; i + 1 < g.size(); ++i) REQUIRE(g[i] < g[i + 1]);
        REQUIRE(g == std::vector<double>{0.0, 1.0, 3.0, 5.0, 10.0});
    }
    SECTION("bump ladder is symmetric about the centre") {
        std::vector<double> knots;
        append_bump_knots(knots, 2.0, 0.5);
        REQUIRE(knots.size() == 25);
        for (const double k : knots) {
            const bool mirrored =
                std::find_if(knots.begin(), knots.end(), [&](double other) {
                    return std::fabs(other - (4.0 - k)) < 1e-12;
                }) != knots.end();
            REQUIRE(mirrored);
        }
    }
    SECTION("knotted integration rejects degenerate grids") {
        const std::vector<double> one{1.0};
        REQUIRE_THROWS_AS(integrate_knotted([](double x) { return x; }, one, 1e-9),
                          domain_error);
        const std::vector<double> flat{1.0, 1.0};
        REQUIRE_THROWS_AS(integrate_knotted([](double x) { return x; }, flat, 1e-9),
                          domain_error);
    }
}

TEST_CASE("iterated 2-D quadrature", "[integrate]") {
    SECTION("separable polynomial") {
        const std::vector<double> k{0.0, 1.0};
        const auto r = integrate_2d([](double x, double y) { return x * y; }, k, k, 1e-9);
        REQUIRE(r.converged);
        REQUIRE(r.value == Approx(0.25).margin(1e-8));
    }
    SECTION("planar Gaussian mass") {
        std::vector<double> kx, ky;
        append_bump_knots(kx, 0.5, 1.0);
        append_bump_knots(ky, -0.25, 1.0);
        const auto gx = finalize_knots(kx, -8.0, 8.0);
        const auto gy = finalize_knots(ky, -8.0, 8.0);
        const auto r = integrate_2d(
            [](double x, double y) {
                return std::exp(-0.5 * ((x - 0.5) * (x - 0.5) + (y + 0.25) * (y + 0.25)));
            },
            gx, gy, 1e-8);
        REQUIRE(r.converged);
        REQUIRE(r.value == Approx(2.0 * std::numbers::pi).epsilon(1e-6));
    }
}

TEST_CASE("mixture loss integral reduces to the closed form for one atom",
          "[integrate]") {
    // A single atom {c, w = 1} is exactly the expanded plug-in, so the 1-D/2-D
    // reduction of the y-integral must reproduce the closed-form loss in any
    // dimension, on both kernel branches.
    struct Case {
        int d;
        double alpha, c, m;
    };
    const Case cases[] = {
        {1, 0.0, 1.3, 0.0},  {1, -0.5, 1.1, 1.7},  {1, 0.6, 2.0, 0.4},  {1, -1.0, 1.5, 2.2},
        {2, 0.0, 1.25, 0.9}, {2, -1.0, 1.4, 1.3},  {3, 0.3, 1.2, 0.0},  {3, -0.7, 1.6, 2.5},
    };
    for (const auto& tc : cases) {
        INFO("d=" << tc.d << " alpha=" << tc.alpha << " c=" << tc.c << " m=" << tc.m);
        const Model model{tc.d, 1.0, 1.0};
        const AlphaLoss loss{tc.alpha};
        MixtureDensity mix{Estimator::identity(), {{tc.c, 1.0}}};
        const double got = mixture_loss_m(model, mix, loss, tc.m);
        const double want = loss.is_kl() ? loss_kl_sq(model, tc.m * tc.m, tc.c)
                                         : loss_closed_sq(model, tc.m * tc.m, tc.c, loss);
        REQUIRE(got == Approx(want).margin(5e-7));
    }
}

TEST_CASE("mixture loss table interpolates the quadrature", "[integrate]") {
    const Model model{2, 1.0, 1.0};
    const AlphaLoss loss{0.0};
    MixtureDensity mix{Estimator::identity(), {{1.1, 0.5}, {1.3, 0.5}}};
    const MixtureLossTable table(model, mix, loss, 3.0);
    REQUIRE(table.m_max() >= 3.0);
    for (const double m : {0.0, 0.37, 1.234, 2.71}) {
        const double direct = mixture_loss_m(model, mix, loss, m);
        REQUIRE(table(m) == Approx(direct).margin(2e-6));
    }
}

TEST_CASE("mixture validation", "[integrate]") {
    MixtureDensity flat{Estimator::identity(), {{1.2, 0.5}, {1.4, 0.5}}};
    REQUIRE_NOTHROW(flat.validate());
    REQUIRE(flat.c_max() == 1.4);
    MixtureDensity at_one{Estimator::identity(), {{1.0, 1.0}}};
    REQUIRE_THROWS_AS(at_one.validate(), domain_error);
    MixtureDensity off{Estimator::identity(), {{1.2, 0.6}, {1.4, 0.6}}};
    REQUIRE_THROWS_AS(off.validate(), domain_error);
    MixtureDensity empty{Estimator::identity(), {}};
    REQUIRE_THROWS_AS(empty.validate(), domain_error);
}
