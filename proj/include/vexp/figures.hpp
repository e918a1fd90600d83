#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "vexp/closed_risk.hpp"
#include "vexp/csv.hpp"
#include "vexp/cutoffs.hpp"
#include "vexp/errors.hpp"
#include "vexp/estimators.hpp"
#include "vexp/model.hpp"
#include "vexp/monte_carlo.hpp"
#include "vexp/version.hpp"

namespace vexp {

struct FigureRow {
    double x = 0.0;
    std::string series;
    double y = 0.0;
};

struct FigureData {
    std::string name;
    std::vector<std::pair<std::string, std::string>> meta; // resolved parameters, in emit order
    std::vector<FigureRow> rows;
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    return v;
}

// Symmetric alpha grid from integer multiples of the step, so alpha = 0 is
// hit exactly (several regression targets live there).
inline std::vector<double> alpha_grid(int steps_per_side, double step) {
    std::vector<double> v;
    for (int i = -steps_per_side; i <= steps_per_side; ++i)
        v.push_back(step * static_cast<double>(i));
    return v;
}

} // namespace detail

// Plug-in over optimal-expansion risk ratio for the identity estimator, as a
// function of alpha; one series per (d, r) pair.  The (2, 9.6568) pair sits
// at the ratio's global maximum in r (~1.2071 at alpha = 0).
inline FigureData figure_fig1() {
    FigureData fig;
    fig.name = "fig1";
    struct P {
        int d;
        double r;
    };
    const std::vector<P> pairs{{1, 1.0}, {2, 1.0}, {5, 1.0}, {10, 1.0}, {2, 9.6568}};
    const auto alphas = detail::alpha_grid(19, 0.05);
    fig.meta = {{"series", "(d,r) pairs"}, {"alpha_grid", "-0.95:0.95:39"}};
    for (const auto& p : pairs) {
        const Model model{p.d, p.r, 1.0}; // only r matters for the ratio
        const std::string series = "d=" + std::to_string(p.d) + " r=" + fmt_g12(p.r);
        for (const double a : alphas)
            fig.rows.push_back({a, series, risk_ratio_identity(model, AlphaLoss{a})});
    }
    return fig;
}

// Hellinger risk ratios of the expanded affine plug-in over the unexpanded
// one, as functions of ||theta||, at the exact cut-off c = k and at the
// interior point c = (1+k)/2; dominance means every ratio <= 1 with equality
// at theta = 0 for c = k.
inline FigureData figure_fig2() {
    FigureData fig;
    fig.name = "fig2";
    const AlphaLoss loss{0.0};
    const double a_est = 0.75;
    const int d = 3;
    fig.meta = {{"estimator", "affine a=0.75"}, {"d", "3"},       {"alpha", "0"},
                {"sigma_x2", "1"},              {"r", "0.5,1,2"}, {"c", "k,(1+k)/2"}};
    for (const double r : {0.5, 1.0, 2.0}) {
        const Model model{d, 1.0, 1.0 / r};
        const double k = cutoff_affine(a_est, r, loss).c_star;
        const std::vector<std::pair<std::string, double>> cs{{"c=k", k}, {"c=(1+k)/2", 0.5 * (1.0 + k)}};
        for (const auto& [tag, c] : cs) {
            const std::string series = "r=" + fmt_g12(r) + " " + tag;
            for (const double t : detail::linspace(0.0, 5.0, 51)) {
                const double num = risk_affine(model, a_est, t, c, loss);
                const double den = risk_affine(model, a_est, t, 1.0, loss);
                fig.rows.push_back({t, series, num / den});
            }
        }
    }
    return fig;
}

// Risk ratios for the nonnegative-mean truncated estimator (d = 1) across
// signed theta, per (r, alpha), at the exact cut-off kappa and at its
// midpoint; dominance holds on both sides of 0 with equality at theta = 0
// for c = kappa.
inline FigureData figure_fig3() {
    FigureData fig;
    fig.name = "fig3";
    fig.meta = {{"estimator", "truncated"},
                {"d", "1"},
                {"sigma_x2", "1"},
                {"r", "1,2"},
                {"alpha", "0,0.5"},
                {"c", "kappa,(1+kappa)/2"}};
    for (const double r : {1.0, 2.0}) {
        const Model model{1, 1.0, 1.0 / r};
        for (const double a : {0.0, 0.5}) {
            const AlphaLoss loss{a};
            const double kappa = cutoff_truncated(r, loss).c_star;
            const std::vector<std::pair<std::string, double>> cs{
                {"c=kappa", kappa}, {"c=(1+kappa)/2", 0.5 * (1.0 + kappa)}};
            for (const auto& [tag, c] : cs) {
                const std::string series =
                    "r=" + fmt_g12(r) + " alpha=" + fmt_g12(a) + " " + tag;
                for (const double t : detail::linspace(-4.0, 4.0, 81)) {
                    const double num = risk_truncated(model, t, c, loss);
                    const double den = risk_truncated(model, t, 1.0, loss);
                    fig.rows.push_back({t, series, num / den});
                }
            }
        }
    }
    return fig;
}

// Sufficient dominance cut-offs (c^2 units) for the James-Stein estimator as
// functions of alpha, one series per sigma_y2; epsilon comes from the
// damped-moment Monte Carlo pipeline, so the curves are seeded.
inline FigureData figure_fig4(std::uint64_t seed, double budget_scale = 1.0) {
    FigureData fig;
    fig.name = "fig4";
    const int d = 3;
    const std::size_t n_per =
        static_cast<std::size_t>(static_cast<double>(30000) * budget_scale);
    fig.meta = {{"estimator", "js"},
                {"d", "3"},
                {"sigma_x2", "1"},
                {"sigma_y2", "1,2,4"},
                {"alpha_grid", "-0.9:0.9:19"},
                {"n_per_point", std::to_string(n_per)}};
    const auto alphas = detail::alpha_grid(9, 0.1);
    const Estimator est = Estimator::james_stein();
    for (const double s_y2 : {1.0, 2.0, 4.0}) {
        const Model model{d, 1.0, s_y2};
        const std::string series = "sigma_y2=" + fmt_g12(s_y2);
        const ThetaSpace space = ThetaSpace::radial_default(model);
        for (const double a : alphas) {
            const AlphaLoss loss{a};
            const EpsilonEstimate eps = mc_epsilon(model, est, space, loss, n_per, seed);
            fig.rows.push_back({a, series, cutoff_general(d, loss, eps.value).c2_star});
        }
    }
    return fig;
}

// Paired Monte Carlo risk ratios of the expansion at the solved cut-off
// (c^2 = k from the epsilon pipeline) over the plug-in, for the positive-part
// James-Stein estimator across dimensions; dominance means ratio <= 1 over
// the whole ||theta|| grid up to Monte Carlo noise.
inline FigureData figure_fig5(std::uint64_t seed, double budget_scale = 1.0) {
    FigureData fig;
    fig.name = "fig5";
    const AlphaLoss loss{0.0};
    const std::size_t n_eps =
        static_cast<std::size_t>(static_cast<double>(100000) * budget_scale);
    const std::size_t n_scan =
        static_cast<std::size_t>(static_cast<double>(200000) * budget_scale);
    fig.meta = {{"estimator", "jsplus"},
                {"alpha", "0"},
                {"sigma_x2", "1"},
                {"sigma_y2", "1"},
                {"d", "3,5,7,9"},
                {"n_epsilon", std::to_string(n_eps)},
                {"n_scan", std::to_string(n_scan)}};
    const Estimator est = Estimator::james_stein_plus();
    for (const int d : {3, 5, 7, 9}) {
        const Model model{d, 1.0, 1.0};
        const EpsilonEstimate eps =
            mc_epsilon(model, est, ThetaSpace::radial_default(model), loss, n_eps, seed);
        const double k = cutoff_general(d, loss, eps.value).c2_star;
        fig.meta.push_back({"k.d" + std::to_string(d), fmt_g12(k)});
        const double c = std::sqrt(k);
        const std::string series = "d=" + std::to_string(d) + " c2=" + fmt_g12(k);
        std::vector<double> grid;
        for (int i = 0; i <= 16; ++i) grid.push_back(0.5 * i);
        const auto rows = dominance_scan(model, est, std::span<const double>(&c, 1), grid, loss,
                                         n_scan, seed);
        for (std::size_t ti = 0; ti < grid.size(); ++ti) {
            const RiskEstimate plug =
                mc_risk_radial(model, est, 1.0, loss, grid[ti], n_scan, seed, ti);
            fig.rows.push_back({grid[ti], series, 1.0 + rows[ti].delta / plug.mean});
        }
    }
    return fig;
}

inline FigureData make_figure(const std::string& name, std::uint64_t seed,
                              double budget_scale = 1.0) {
    if (name == "fig1") return figure_fig1();
    if (name == "fig2") return figure_fig2();
    if (name == "fig3") return figure_fig3();
    if (name == "fig4") return figure_fig4(seed, budget_scale);
    if (name == "fig5") return figure_fig5(seed, budget_scale);
    throw domain_error("unknown figure name: " + name + " (expected fig1..fig5)");
}

inline void write_figure_csv(std::ostream& os, const FigureData& fig, std::uint64_t seed) {
    CsvWriter csv(os);
    csv.meta("artifact", "vexp");
    csv.meta("version", version_string);
    csv.meta("csv_schema", csv_schema_version);
    csv.meta("figure", fig.name);
    for (const auto& [k, v] : fig.meta) csv.meta(k, v);
    csv.meta("seed", seed);
    const std::vector<std::string> hdr{"x", "series_id", "y"};
    csv.header(hdr);
    for (const auto& row : fig.rows) {
        const std::vector<std::string> cells{fmt_g12(row.x), row.series, fmt_g12(row.y)};
        csv.row(cells);
    }
}

} // namespace vexp
