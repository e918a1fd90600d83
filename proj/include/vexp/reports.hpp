#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
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

// Shared request shape for the sweep-style commands.  Every render function
// embeds the fully resolved request in the CSV metadata block, so a file is
// reproducible from its own header.
struct SweepRequest {
    Model model;
    Estimator est;
    std::vector<double> alphas{0.0};
    std::vector<double> cs{1.0};
    std::vector<double> theta_grid{0.0};
    std::size_t n = 100000;
    std::uint64_t seed = 20260814;
    bool force_mc = false;
};

namespace detail {

inline std::string join_g12(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += fmt_g12(v[i]);
    }
    return s;
}

inline void emit_common_meta(CsvWriter& csv, const SweepRequest& req, const char* command) {
    csv.meta("artifact", "vexp");
    csv.meta("version", version_string);
    csv.meta("csv_schema", csv_schema_version);
    csv.meta("command", command);
    csv.meta("d", req.model.d);
    csv.meta("sigma_x2", req.model.sigma_x2);
    csv.meta("sigma_y2", req.model.sigma_y2);
    csv.meta("estimator", req.est.descriptor);
    csv.meta("alpha", join_g12(req.alphas));
    csv.meta("c", join_g12(req.cs));
    csv.meta("theta_grid", join_g12(req.theta_grid));
    csv.meta("n_samples", req.n);
    csv.meta("seed", req.seed);
}

inline void validate_sweep(const SweepRequest& req, bool needs_c) {
    req.model.validate();
    if (req.alphas.empty()) throw domain_error("request: need at least one alpha");
    for (const double a : req.alphas) AlphaLoss{a}.validate();
    if (needs_c) {
        if (req.cs.empty()) throw domain_error("request: need at least one c");
        for (const double c : req.cs)
            if (!(c > 0.0)) throw domain_error("request: c must be > 0");
    }
    if (req.theta_grid.empty()) throw domain_error("request: need a theta grid");
    for (const double t : req.theta_grid)
        if (req.model.d > 1 && t < 0.0)
            throw domain_error("request: negative theta norms only make sense for d = 1");
}

// Closed-form risk where one exists for (estimator, model); callers check
// has_closed_risk first.
inline double closed_risk_value(const Estimator& est, const Model& model, double theta,
                                double c, const AlphaLoss& loss) {
    switch (est.kind) {
        case Estimator::Kind::identity:
            return loss.is_kl() ? risk_kl_plugin(model, model.d * model.sigma_x2, c)
                                : risk_identity(model, c, loss);
        case Estimator::Kind::affine:
            return loss.is_kl()
                       ? risk_kl_plugin(model,
                                        est.a * est.a * model.d * model.sigma_x2 +
                                            (1.0 - est.a) * (1.0 - est.a) * theta * theta,
                                        c)
                       : risk_affine(model, est.a, std::fabs(theta), c, loss);
        case Estimator::Kind::truncated_nonneg:
            if (loss.is_kl()) break;
            return risk_truncated(model, theta, c, loss);
        default:
            break;
    }
    throw domain_error("closed_risk_value: no closed form for estimator " + est.descriptor);
}

inline bool closed_form_available(const Estimator& est, const Model& model,
                                  const AlphaLoss& loss) {
    if (!has_closed_risk(est, model)) return false;
    if (est.kind == Estimator::Kind::truncated_nonneg && loss.is_kl()) return false;
    return true;
}

} // namespace detail

// risk: one row per (theta, c, alpha); closed form when available unless
// force_mc, Monte Carlo otherwise.  MC rows at a fixed theta share draws
// (task keyed by theta index).
inline void render_risk_csv(std::ostream& os, const SweepRequest& req) {
    detail::validate_sweep(req, true);
    CsvWriter csv(os);
    detail::emit_common_meta(csv, req, "risk");
    csv.meta("force_mc", req.force_mc ? "1" : "0");
    const std::vector<std::string> hdr{"theta_norm", "c", "alpha", "risk", "stderr", "method"};
    csv.header(hdr);
    for (std::size_t ti = 0; ti < req.theta_grid.size(); ++ti) {
        const double theta = req.theta_grid[ti];
        for (const double c : req.cs) {
            for (const double a : req.alphas) {
                const AlphaLoss loss{a};
                std::vector<std::string> cells(6);
                cells[0] = fmt_g12(theta);
                cells[1] = fmt_g12(c);
                cells[2] = fmt_g12(a);
                if (!req.force_mc && detail::closed_form_available(req.est, req.model, loss)) {
                    cells[3] = fmt_g12(detail::closed_risk_value(req.est, req.model, theta, c, loss));
                    cells[4] = "";
                    cells[5] = "closed";
                } else {
                    const RiskEstimate re =
                        mc_risk_radial(req.model, req.est, c, loss, theta, req.n, req.seed, ti);
                    cells[3] = fmt_g12(re.mean);
                    cells[4] = fmt_g12(re.se);
                    cells[5] = "mc";
                }
                csv.row(std::span<const std::string>(cells));
            }
        }
    }
}

// ratio: risk of each expansion over the plug-in risk (same estimator),
// closed form or paired MC.
inline void render_ratio_csv(std::ostream& os, const SweepRequest& req) {
    detail::validate_sweep(req, true);
    CsvWriter csv(os);
    detail::emit_common_meta(csv, req, "ratio");
    const std::vector<std::string> hdr{"theta_norm", "c", "alpha", "ratio", "stderr", "method"};
    csv.header(hdr);
    for (std::size_t ti = 0; ti < req.theta_grid.size(); ++ti) {
        const double theta = req.theta_grid[ti];
        for (const double a : req.alphas) {
            const AlphaLoss loss{a};
            const bool closed =
                !req.force_mc && detail::closed_form_available(req.est, req.model, loss);
            if (closed) {
                const double den = detail::closed_risk_value(req.est, req.model, theta, 1.0, loss);
                for (const double c : req.cs) {
                    const double num =
                        detail::closed_risk_value(req.est, req.model, theta, c, loss);
                    const std::vector<std::string> cells{fmt_g12(theta), fmt_g12(c), fmt_g12(a),
                                                         fmt_g12(num / den), "", "closed"};
                    csv.row(std::span<const std::string>(cells));
                }
            } else {
                const auto rows = dominance_scan(req.model, req.est, req.cs,
                                                 std::span<const double>(&theta, 1), loss, req.n,
                                                 req.seed);
                const RiskEstimate plug =
                    mc_risk_radial(req.model, req.est, 1.0, loss, theta, req.n, req.seed, 0);
                for (const auto& row : rows) {
                    const double ratio = 1.0 + row.delta / plug.mean;
                    const double se = row.se / plug.mean; // paired-delta error dominates
                    const std::vector<std::string> cells{fmt_g12(theta),     fmt_g12(row.c),
                                                         fmt_g12(a),         fmt_g12(ratio),
                                                         fmt_g12(se),        "mc"};
                    csv.row(std::span<const std::string>(cells));
                }
            }
        }
    }
}

// scan: paired risk differences delta(theta, c) = risk(c) - risk(1) with the
// common-random-numbers standard error, one row per (theta, c, alpha).
inline void render_scan_csv(std::ostream& os, const SweepRequest& req) {
    detail::validate_sweep(req, true);
    CsvWriter csv(os);
    detail::emit_common_meta(csv, req, "scan");
    const std::vector<std::string> hdr{"theta_norm", "c", "alpha", "delta", "stderr", "n"};
    csv.header(hdr);
    for (const double a : req.alphas) {
        const AlphaLoss loss{a};
        const auto rows =
            dominance_scan(req.model, req.est, req.cs, req.theta_grid, loss, req.n, req.seed);
        for (const auto& row : rows) {
            const std::vector<std::string> cells{
                fmt_g12(row.theta_norm), fmt_g12(row.c),  fmt_g12(a),
                fmt_g12(row.delta),      fmt_g12(row.se), std::to_string(row.n)};
            csv.row(std::span<const std::string>(cells));
        }
    }
}

// epsilon: the damped-moment infimum per alpha, with the search-space
// diagnostics that qualify it.  All estimates are computed up front so the
// per-alpha grid descriptors can live in the metadata block.
inline void render_epsilon_csv(std::ostream& os, const SweepRequest& req, const ThetaSpace& space) {
    detail::validate_sweep(req, false);
    std::vector<EpsilonEstimate> ests;
    ests.reserve(req.alphas.size());
    for (const double a : req.alphas)
        ests.push_back(mc_epsilon(req.model, req.est, space, AlphaLoss{a}, req.n, req.seed));
    CsvWriter csv(os);
    detail::emit_common_meta(csv, req, "epsilon");
    csv.meta("z", ests.front().z_definition);
    for (std::size_t i = 0; i < ests.size(); ++i)
        csv.meta("grid[alpha=" + fmt_g12(req.alphas[i]) + "]", ests[i].grid_descriptor);
    const std::vector<std::string> hdr{"alpha",     "epsilon",     "arg_theta", "stderr_at_min",
                                       "tail_value", "tail_radius", "n_per_point"};
    csv.header(hdr);
    for (std::size_t i = 0; i < ests.size(); ++i) {
        const EpsilonEstimate& e = ests[i];
        const std::vector<std::string> cells{
            fmt_g12(req.alphas[i]),   fmt_g12(e.value),      fmt_g12(e.arg_theta),
            fmt_g12(e.stderr_at_min), fmt_g12(e.tail_value), fmt_g12(e.tail_radius),
            std::to_string(e.n_per_point)};
        csv.row(std::span<const std::string>(cells));
    }
}

// cutoff: one row per alpha with the solver appropriate to the estimator
// (exact equation for affine/truncated, epsilon pipeline otherwise; the
// identity estimator's epsilon is closed-form).  At the KL endpoint an extra
// row reports the exact benchmark threshold c0 alongside the sufficient one.
inline void render_cutoff_csv(std::ostream& os, const SweepRequest& req) {
    detail::validate_sweep(req, false);
    const double r = req.model.r();
    struct Line {
        double alpha;
        CutoffResult res;
    };
    std::vector<Line> lines;
    std::vector<std::pair<std::string, double>> extra_meta;
    for (const double a : req.alphas) {
        const AlphaLoss loss{a};
        double epsilon = -1.0;
        switch (req.est.kind) {
            case Estimator::Kind::affine:
                lines.push_back({a, cutoff_affine(req.est.a, r, loss)});
                break;
            case Estimator::Kind::truncated_nonneg:
                if (req.model.d != 1)
                    throw domain_error("cutoff: truncated estimator requires d = 1");
                if (loss.is_kl())
                    throw domain_error("cutoff: truncated estimator has no KL cut-off solver");
                lines.push_back({a, cutoff_truncated(r, loss)});
                break;
            case Estimator::Kind::identity:
                epsilon = epsilon_identity(req.model, loss);
                lines.push_back({a, cutoff_general(req.model.d, loss, epsilon)});
                break;
            default: {
                const EpsilonEstimate e = mc_epsilon(req.model, req.est,
                                                     ThetaSpace::radial_default(req.model), loss,
                                                     req.n, req.seed);
                epsilon = e.value;
                extra_meta.emplace_back("epsilon_hat[alpha=" + fmt_g12(a) + "]", epsilon);
                lines.push_back({a, cutoff_general(req.model.d, loss, epsilon)});
                break;
            }
        }
        // At the KL endpoint the epsilon route also admits the exact
        // threshold; report it next to the sufficient one.
        if (loss.is_kl() && epsilon > 0.0)
            lines.push_back({a, cutoff_kl_exact(epsilon / req.model.d)});
    }
    CsvWriter csv(os);
    detail::emit_common_meta(csv, req, "cutoff");
    for (const auto& [key, value] : extra_meta) csv.meta(key, value);
    const std::vector<std::string> hdr{"alpha", "cutoff_kind", "c_star", "c2_star", "residual"};
    csv.header(hdr);
    for (const Line& line : lines) {
        const std::vector<std::string> cells{fmt_g12(line.alpha), line.res.method,
                                             fmt_g12(line.res.c_star), fmt_g12(line.res.c2_star),
                                             fmt_g12(line.res.residual)};
        csv.row(std::span<const std::string>(cells));
    }
}

// empirical-cutoff: bisection on the sign of the paired risk-difference
// supremum over the theta grid; the empirical analogue of the exact
// thresholds, one row per alpha.
inline void render_empirical_cutoff_csv(std::ostream& os, const SweepRequest& req, double tol) {
    detail::validate_sweep(req, false);
    CsvWriter csv(os);
    detail::emit_common_meta(csv, req, "empirical-cutoff");
    csv.meta("tol", tol);
    const std::vector<std::string> hdr{"alpha", "c2_star", "c_star", "capped", "tol",
                                       "n_per_point"};
    csv.header(hdr);
    for (const double a : req.alphas) {
        const AlphaLoss loss{a};
        const EmpiricalCutoff ec =
            empirical_cutoff(req.model, req.est, loss, req.theta_grid, req.seed, tol, req.n);
        const std::vector<std::string> cells{fmt_g12(a),
                                             fmt_g12(ec.c2_star),
                                             fmt_g12(ec.c_star),
                                             ec.capped ? "1" : "0",
                                             fmt_g12(ec.tol),
                                             std::to_string(ec.n_per_point)};
        csv.row(std::span<const std::string>(cells));
    }
}

} // namespace vexp
