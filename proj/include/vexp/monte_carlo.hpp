#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vexp/closed_risk.hpp"
#include "vexp/divergence.hpp"
#include "vexp/errors.hpp"
#include "vexp/estimators.hpp"
#include "vexp/model.hpp"
#include "vexp/parallel.hpp"
#include "vexp/rng.hpp"

namespace vexp {

struct RiskEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

namespace detail {

// Draw X ~ N_d(theta, sigma_x2 I), apply the estimator, return
// ||theta_hat - theta||^2.  The one sampling kernel every MC routine uses:
// d normal deviates per sample, always in coordinate order, so two routines
// given the same (seed, task, chunk) triple see identical X sequences.
struct SampleKernel {
    const Model& model;
    const Estimator& est;
    std::span<const double> theta;
    std::vector<double> x, th_hat;

    SampleKernel(const Model& m, const Estimator& e, std::span<const double> th)
        : model(m), est(e), theta(th), x(m.d), th_hat(m.d) {}

    double operator()(RngStream& rng) {
        const double sx = model.sigma_x();
        for (int j = 0; j < model.d; ++j) x[j] = theta[j] + sx * rng.normal();
        evaluate(est, x, th_hat, model);
        double m2 = 0.0;
        for (int j = 0; j < model.d; ++j) {
            const double diff = th_hat[j] - theta[j];
            m2 += diff * diff;
        }
        return m2;
    }
};

inline std::vector<double> radial_point(const Model& model, double theta_norm) {
    std::vector<double> th(model.d, 0.0);
    th[0] = theta_norm;
    return th;
}

} // namespace detail

// Monte Carlo risk of the expanded plug-in q_{theta_hat, c} at theta.
// For |alpha| < 1 the per-sample statistic is the inner exponential
// exp(-||theta_hat - theta||^2 / (2 gamma0)); mean and standard error are
// transformed through the affine outer map.  alpha = -1 averages per-sample
// KL losses directly.
inline RiskEstimate mc_risk(const Model& model, const Estimator& est, double c,
                            const AlphaLoss& loss, std::span<const double> theta, std::size_t n,
                            std::uint64_t seed, std::uint64_t task_id = 0) {
    loss.validate();
    if (n < 100) throw domain_error("mc_risk: need n >= 100");
    if (!(c > 0.0)) throw domain_error("mc_risk: c must be > 0");
    const std::size_t chunks = num_chunks_for(n);
    std::vector<MeanVar> parts(chunks);
    const bool kl = loss.is_kl();
    const double a = loss.alpha;
    const double inv2g = kl ? 0.0 : 1.0 / (2.0 * gamma0_of(c, a, model.sigma_y2));
    parallel_for_chunks(chunks, [&](std::size_t ci) {
        RngStream rng = substream(seed, task_id, ci);
        const std::size_t count = std::min(mc_chunk_size, n - ci * mc_chunk_size);
        detail::SampleKernel draw(model, est, theta);
        MeanVar acc;
        for (std::size_t i = 0; i < count; ++i) {
            const double m2 = draw(rng);
            acc.add(kl ? loss_kl_sq(model, m2, c) : exp_neg(m2 * inv2g));
        }
        parts[ci] = acc;
    });
    MeanVar total;
    for (const auto& p : parts) total.merge(p);
    if (kl) return {total.mean(), total.stderr_mean(), n, seed};
    const double scale = (4.0 / (1.0 - a * a)) * std::pow(a1_of(c, a), model.d);
    return {(4.0 / (1.0 - a * a)) - scale * total.mean(), scale * total.stderr_mean(), n, seed};
}

inline RiskEstimate mc_risk_radial(const Model& model, const Estimator& est, double c,
                                   const AlphaLoss& loss, double theta_norm, std::size_t n,
                                   std::uint64_t seed, std::uint64_t task_id = 0) {
    const auto th = detail::radial_point(model, theta_norm);
    return mc_risk(model, est, c, loss, th, n, seed, task_id);
}

struct ScanRow {
    double theta_norm = 0.0;
    double c = 1.0;
    double delta = 0.0; // risk(c) - risk(1), paired
    double se = 0.0;    // standard error of the paired difference
    std::size_t n = 0;
};

// Paired dominance scan: at each theta the SAME X samples feed every c
// (common random numbers), so delta is a paired estimate with far smaller
// standard error than differencing two independent runs.
inline std::vector<ScanRow> dominance_scan(const Model& model, const Estimator& est,
                                           std::span<const double> c_values,
                                           std::span<const double> theta_grid,
                                           const AlphaLoss& loss, std::size_t n,
                                           std::uint64_t seed) {
    loss.validate();
    if (n < 100) throw domain_error("dominance_scan: need n >= 100");
    const bool kl = loss.is_kl();
    const double a = loss.alpha;
    const std::size_t nc = c_values.size();
    struct CParams {
        double inv2g;
        double a1d;
    };
    std::vector<CParams> cp(nc);
    double inv2g_ref = 0.0;
    if (!kl) {
        for (std::size_t j = 0; j < nc; ++j) {
            if (!(c_values[j] > 0.0)) throw domain_error("dominance_scan: c must be > 0");
            cp[j] = {1.0 / (2.0 * gamma0_of(c_values[j], a, model.sigma_y2)),
                     std::pow(a1_of(c_values[j], a), model.d)};
        }
        inv2g_ref = 1.0 / (2.0 * gamma0_of(1.0, a, model.sigma_y2));
    }
    std::vector<ScanRow> rows;
    rows.reserve(theta_grid.size() * nc);
    for (std::size_t ti = 0; ti < theta_grid.size(); ++ti) {
        const auto th = detail::radial_point(model, theta_grid[ti]);
        const std::size_t chunks = num_chunks_for(n);
        std::vector<std::vector<MeanVar>> parts(chunks, std::vector<MeanVar>(nc));
        parallel_for_chunks(chunks, [&](std::size_t ci) {
            RngStream rng = substream(seed, ti, ci);
            const std::size_t count = std::min(mc_chunk_size, n - ci * mc_chunk_size);
            detail::SampleKernel draw(model, est, th);
            std::vector<MeanVar> acc(nc);
            for (std::size_t i = 0; i < count; ++i) {
                const double m2 = draw(rng);
                if (kl) {
                    const double ref = loss_kl_sq(model, m2, 1.0);
                    for (std::size_t j = 0; j < nc; ++j)
                        acc[j].add(loss_kl_sq(model, m2, c_values[j]) - ref);
                } else {
                    const double gref = exp_neg(m2 * inv2g_ref);
                    for (std::size_t j = 0; j < nc; ++j)
                        acc[j].add((4.0 / (1.0 - a * a)) *
                                   (gref - cp[j].a1d * exp_neg(m2 * cp[j].inv2g)));
                }
            }
            parts[ci] = std::move(acc);
        });
        for (std::size_t j = 0; j < nc; ++j) {
            MeanVar total;
            for (const auto& p : parts) total.merge(p[j]);
            rows.push_back({theta_grid[ti], c_values[j], total.mean(), total.stderr_mean(), n});
        }
    }
    return rows;
}

struct EmpiricalCutoff {
    double c2_star = 1.0;
    double c_star = 1.0;
    bool capped = false; // sup of the risk difference never went positive up to the cap
    double tol = 0.0;
    std::size_t n_per_point = 0;
};

// Empirical exact dominance threshold, in c^2 units: bisection on the sign
// of sup over the theta grid of the paired risk difference, using an upper
// confidence bound (delta + z se > 0 counts as a violation).  The UCB makes
// the returned threshold conservative by a few standard errors: everything
// at or below it showed no detectable violation.  Substreams are keyed by
// theta index only, so every bisection step reuses the same X draws (the
// empirical delta curves are coherent in c, keeping the predicate monotone).
inline EmpiricalCutoff empirical_cutoff(const Model& model, const Estimator& est,
                                        const AlphaLoss& loss, std::span<const double> theta_grid,
                                        std::uint64_t seed, double tol = 0.005,
                                        std::size_t n_per_point = 200000, double z = 3.0,
                                        double c2_cap = 50.0) {
    loss.validate();
    if (theta_grid.empty()) throw domain_error("empirical_cutoff: theta grid must be non-empty");
    if (!(tol > 0.0)) throw domain_error("empirical_cutoff: tol must be > 0");
    auto violated = [&](double c2) {
        const double c = std::sqrt(c2);
        const auto rows = dominance_scan(model, est, std::span<const double>(&c, 1), theta_grid,
                                         loss, n_per_point, seed);
        double worst = -1e300;
        for (const auto& row : rows) worst = std::max(worst, row.delta + z * row.se);
        return worst > 0.0;
    };
    double lo = 1.0 + tol;
    if (violated(lo))
        throw solver_error("empirical_cutoff: risk difference already positive at c^2 = 1 + tol; "
                           "no dominance interval detected at this budget");
    double hi = std::max(2.0, lo * 1.5);
    while (!violated(hi)) {
        if (hi >= c2_cap) return {c2_cap, std::sqrt(c2_cap), true, tol, n_per_point};
        lo = hi;
        hi = std::min(c2_cap, hi * 2.0);
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (violated(mid) ? hi : lo) = mid;
    }
    const double c2 = 0.5 * (lo + hi);
    return {c2, std::sqrt(c2), false, tol, n_per_point};
}

struct EpsilonEstimate {
    double value = 0.0;         // grid minimum of the per-theta estimates
    double arg_theta = 0.0;     // ||theta|| attaining it
    double stderr_at_min = 0.0;
    double tail_value = 0.0;    // estimate at the largest radius examined
    double tail_radius = 0.0;
    std::string grid_descriptor;
    std::string z_definition = "Z = ||theta_hat(X) - theta||^2 / sigma_y2";
    std::size_t n_per_point = 0;
    std::uint64_t seed = 0;
};

// Damped-moment infimum: inf over the search space of
// E_theta( Z exp(-(1-alpha^2) Z / 8) ), Z = ||theta_hat(X)-theta||^2/sigma_y2.
// Estimated on a radial grid (valid for the orthogonally equivariant
// catalog), extended outward by doubling until the profile flattens, then
// refined by local subdivision around the argmin.  The reported value is the
// minimum over every evaluated point, so refinement can only lower it.
// The infimum over a noncompact space is necessarily approximated; the tail
// value is reported alongside so callers can judge the profile's behaviour.
inline EpsilonEstimate mc_epsilon(const Model& model, const Estimator& est, const ThetaSpace& space,
                                  const AlphaLoss& loss, std::size_t n_per_point,
                                  std::uint64_t seed) {
    loss.validate();
    if (space.radii.empty()) throw domain_error("mc_epsilon: space grid must be non-empty");
    if (n_per_point < 100) throw domain_error("mc_epsilon: need n >= 100 per grid point");
    const double a = loss.alpha;
    const double s = (1.0 - a * a) / 8.0; // 0 at the KL endpoint: plain second moment

    struct Eval {
        double radius, value, se;
    };
    std::vector<Eval> evals;
    std::uint64_t ordinal = 0; // task counter: the evaluation schedule is deterministic

    auto eval_at = [&](double radius) {
        const std::size_t chunks = num_chunks_for(n_per_point);
        std::vector<MeanVar> parts(chunks);
        const auto th = detail::radial_point(model, radius);
        const std::uint64_t task = ordinal++;
        parallel_for_chunks(chunks, [&](std::size_t ci) {
            RngStream rng = substream(seed, task, ci);
            const std::size_t count = std::min(mc_chunk_size, n_per_point - ci * mc_chunk_size);
            detail::SampleKernel draw(model, est, th);
            MeanVar acc;
            for (std::size_t i = 0; i < count; ++i) {
                const double z = draw(rng) / model.sigma_y2;
                acc.add(z * exp_neg(s * z));
            }
            parts[ci] = acc;
        });
        MeanVar total;
        for (const auto& p : parts) total.merge(p);
        Eval e{radius, total.mean(), total.stderr_mean()};
        evals.push_back(e);
        return e;
    };

    std::vector<double> radii = space.radii;
    std::sort(radii.begin(), radii.end());
    for (const double radius : radii) eval_at(radius);

    // extend outward until the profile flattens (or the radius cap is hit)
    int doublings = 0;
    if (space.auto_extend) {
        const double cap = 64.0 * std::max(radii.back(), model.sigma_x());
        while (doublings < 8) {
            const Eval last = evals.back();
            if (last.radius >= cap) break;
            eval_at(1.5 * last.radius);
            const Eval next = eval_at(2.0 * last.radius);
            ++doublings;
            const double flat_tol =
                std::max(1e-3 * std::max(1.0, std::fabs(next.value)), 3.0 * (last.se + next.se));
            if (std::fabs(next.value - last.value) <= flat_tol) break;
        }
    }

    // local subdivision around the argmin until the grid step is resolved
    const double step_tol = model.sigma_x() / 32.0;
    for (int round = 0; round < 12; ++round) {
        std::sort(evals.begin(), evals.end(),
                  [](const Eval& u, const Eval& v) { return u.radius < v.radius; });
        std::size_t imin = 0;
        for (std::size_t i = 1; i < evals.size(); ++i)
            if (evals[i].value < evals[imin].value) imin = i;
        std::vector<double> new_radii;
        if (imin > 0 && evals[imin].radius - evals[imin - 1].radius > step_tol)
            new_radii.push_back(0.5 * (evals[imin - 1].radius + evals[imin].radius));
        if (imin + 1 < evals.size() && evals[imin + 1].radius - evals[imin].radius > step_tol)
            new_radii.push_back(0.5 * (evals[imin].radius + evals[imin + 1].radius));
        if (new_radii.empty()) break;
        for (const double radius : new_radii) eval_at(radius);
    }

    std::size_t imin = 0;
    std::size_t itail = 0;
    for (std::size_t i = 1; i < evals.size(); ++i) {
        if (evals[i].value < evals[imin].value) imin = i;
        if (evals[i].radius > evals[itail].radius) itail = i;
    }
    EpsilonEstimate out;
    out.value = evals[imin].value;
    out.arg_theta = evals[imin].radius;
    out.stderr_at_min = evals[imin].se;
    out.tail_value = evals[itail].value;
    out.tail_radius = evals[itail].radius;
    out.n_per_point = n_per_point;
    out.seed = seed;
    out.grid_descriptor = "radial[0," + std::to_string(evals[itail].radius) + "] points=" +
                          std::to_string(evals.size()) + " doublings=" + std::to_string(doublings);
    if (out.value <= 3.0 * out.stderr_at_min)
        throw inapplicable_error(
            "mc_epsilon: epsilon indistinguishable from zero at this budget (value " +
            std::to_string(out.value) + ", stderr " + std::to_string(out.stderr_at_min) +
            "); the dominance cut-off is undefined for this estimator/space");
    return out;
}

} // namespace vexp
