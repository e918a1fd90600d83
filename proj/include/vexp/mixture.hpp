#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <span>
#include <vector>

#include "vexp/divergence.hpp"
#include "vexp/errors.hpp"
#include "vexp/estimators.hpp"
#include "vexp/integrate.hpp"
#include "vexp/model.hpp"
#include "vexp/monte_carlo.hpp"
#include "vexp/parallel.hpp"

namespace vexp {

// Discrete variance-mixture predictive density built on an estimator:
//   q_F(y; x) = sum_i w_i N_d(theta_hat(x), c_i^2 sigma_y2 I)(y)
// Atoms live strictly above the plug-in (c_i > 1) with weights summing to 1;
// keeping them inside the dominance interval is the caller's business (it
// depends on the estimator), the type only enforces the cdf-shape conditions.
struct MixtureAtom {
    double c = 1.0;
    double w = 1.0;
};

struct MixtureDensity {
    Estimator base;
    std::vector<MixtureAtom> atoms;

    void validate() const {
        if (atoms.empty()) throw domain_error("MixtureDensity: need at least one atom");
        double wsum = 0.0;
        for (const auto& atom : atoms) {
            if (!(atom.c > 1.0) || !std::isfinite(atom.c))
                throw domain_error("MixtureDensity: atoms must have c > 1");
            if (!(atom.w > 0.0)) throw domain_error("MixtureDensity: weights must be > 0");
            wsum += atom.w;
        }
        if (std::fabs(wsum - 1.0) > 1e-9)
            throw domain_error("MixtureDensity: weights must sum to 1");
    }

    double c_max() const {
        double m = 0.0;
        for (const auto& atom : atoms) m = std::max(m, atom.c);
        return m;
    }
};

// Divergence loss of the mixture against N_d(theta, sigma_y2 I) as a function
// of m = ||theta_hat - theta||.  The y-integral depends on y only through its
// component t along theta - theta_hat and the orthogonal radius rho, so it
// reduces to a 2-D quadrature (1-D when d = 1) with the (d-2)-sphere surface
// area 2 pi^((d-1)/2) / Gamma((d-1)/2) as the symmetry factor.
inline double mixture_loss_m(const Model& model, const MixtureDensity& mix, const AlphaLoss& loss,
                             double m, double abs_tol = 1e-7) {
    loss.validate();
    mix.validate();
    if (!(m >= 0.0)) throw domain_error("mixture_loss_m: m must be >= 0");
    const int d = model.d;
    const double s2 = model.sigma_y2;
    const double span = 12.0 * mix.c_max() * model.sigma_y();
    const double lp0 = -0.5 * d * std::log(2.0 * std::numbers::pi * s2);
    struct AtomTerm {
        double l0, inv2v;
    };
    std::vector<AtomTerm> terms;
    terms.reserve(mix.atoms.size());
    for (const auto& atom : mix.atoms)
        terms.push_back({std::log(atom.w) - 0.5 * d * std::log(2.0 * std::numbers::pi * atom.c * atom.c * s2),
                         1.0 / (2.0 * atom.c * atom.c * s2)});
    const double inv2s = 1.0 / (2.0 * s2);
    auto integrand = [&](double t, double rho2) {
        const double p = std::exp(lp0 - ((t - m) * (t - m) + rho2) * inv2s);
        double q = 0.0;
        const double u = t * t + rho2;
        for (const auto& at : terms) q += std::exp(at.l0 - u * at.inv2v);
        return loss_integrand(p, q, loss);
    };
    // The integrand is a handful of Gaussian bumps (target near t = m,
    // mixture near t = 0, cross terms between) of width >= sigma_y in a
    // domain tens of sigma wide: knot both axes so no bump can fall between
    // the probe points of a coarse adaptive pass.
    const double bump = mix.c_max() * model.sigma_y();
    std::vector<double> t_knots;
    append_bump_knots(t_knots, 0.0, bump);
    append_bump_knots(t_knots, m, bump);
    const auto tk = finalize_knots(std::move(t_knots), -span, m + span);
    QuadResult qr;
    double scale = 1.0;
    if (d == 1) {
        qr = integrate_knotted([&](double t) { return integrand(t, 0.0); }, tk, abs_tol);
    } else {
        scale = 2.0 * std::pow(std::numbers::pi, 0.5 * (d - 1)) / std::tgamma(0.5 * (d - 1));
        std::vector<double> r_knots;
        append_bump_knots(r_knots, 0.0, bump);
        const auto rk = finalize_knots(std::move(r_knots), 0.0, span);
        qr = integrate_2d(
            [&](double t, double rho) {
                return std::pow(rho, d - 2) * integrand(t, rho * rho);
            },
            tk, rk, abs_tol / scale);
    }
    if (!qr.converged) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "mixture_loss_m: quadrature did not converge (error estimate %.3g, "
                      "target %.3g)",
                      qr.error_estimate * scale, abs_tol);
        throw quadrature_error(msg);
    }
    return scale * qr.value;
}

// Uniform-grid cubic-interpolation cache of mixture_loss_m over [0, m_max].
// Node spacing sigma_y/24 keeps the 4-point Lagrange error below the 1e-7
// quadrature target (the loss varies on the scale sqrt(gamma0) >= 2 sigma_y).
// Nodes are filled in parallel by index.
class MixtureLossTable {
  public:
    MixtureLossTable(const Model& model, const MixtureDensity& mix, const AlphaLoss& loss,
                     double m_max, double abs_tol = 1e-7) {
        if (!(m_max >= 0.0)) throw domain_error("MixtureLossTable: m_max must be >= 0");
        h_ = model.sigma_y() / 24.0;
        const std::size_t n = static_cast<std::size_t>(std::ceil(m_max / h_)) + 4;
        vals_.resize(n);
        parallel_for_chunks(n, [&](std::size_t i) {
            vals_[i] = mixture_loss_m(model, mix, loss, static_cast<double>(i) * h_, abs_tol);
        });
        m_max_ = static_cast<double>(n - 3) * h_;
    }

    double operator()(double m) const {
        const double u = m / h_;
        const std::size_t n = vals_.size();
        std::size_t i0 = 0;
        if (u > 1.0) i0 = std::min(static_cast<std::size_t>(u) - 1, n - 4);
        const double x = u - static_cast<double>(i0);
        const double w0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        const double w1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        const double w2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        const double w3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        return w0 * vals_[i0] + w1 * vals_[i0 + 1] + w2 * vals_[i0 + 2] + w3 * vals_[i0 + 3];
    }

    double m_max() const { return m_max_; }
    std::size_t nodes() const { return vals_.size(); }

  private:
    double h_ = 1.0;
    double m_max_ = 0.0;
    std::vector<double> vals_;
};

namespace detail {

// First pass shared by the mixture routines: the estimation-error radii
// m_i = ||theta_hat(X_i) - theta||, stored in sample order so the second pass
// is a deterministic replay whatever the worker count.
inline std::vector<double> sample_error_radii(const Model& model, const Estimator& est,
                                              std::span<const double> theta, std::size_t n,
                                              std::uint64_t seed, std::uint64_t task_id) {
    std::vector<double> radii(n);
    const std::size_t chunks = num_chunks_for(n);
    parallel_for_chunks(chunks, [&](std::size_t ci) {
        RngStream rng = substream(seed, task_id, ci);
        const std::size_t base = ci * mc_chunk_size;
        const std::size_t count = std::min(mc_chunk_size, n - base);
        SampleKernel draw(model, est, theta);
        for (std::size_t i = 0; i < count; ++i) radii[base + i] = std::sqrt(draw(rng));
    });
    return radii;
}

} // namespace detail

// Risk of the mixture at theta: Monte Carlo over X, quadrature over y.  Uses
// the same substreams as mc_risk(task_id), so a single-atom mixture replays
// bit-identical X draws and the comparison is exact up to table accuracy.
inline RiskEstimate mixture_risk(const Model& model, const MixtureDensity& mix,
                                 const AlphaLoss& loss, std::span<const double> theta,
                                 std::size_t n, std::uint64_t seed, std::uint64_t task_id = 0) {
    loss.validate();
    mix.validate();
    if (n < 100) throw domain_error("mixture_risk: need n >= 100");
    const auto radii = detail::sample_error_radii(model, mix.base, theta, n, seed, task_id);
    const double m_max = *std::max_element(radii.begin(), radii.end());
    const MixtureLossTable table(model, mix, loss, m_max);
    MeanVar acc;
    for (const double m : radii) acc.add(table(m));
    return {acc.mean(), acc.stderr_mean(), n, seed};
}

struct MixtureScanRow {
    double theta_norm = 0.0;
    RiskEstimate mixture;
    RiskEstimate plugin;
    double delta = 0.0;    // mixture risk minus plug-in risk, paired
    double delta_se = 0.0;
};

// Paired comparison of the mixture against the plug-in q_{theta_hat,1} on a
// radial theta grid: one loss table serves every grid point (radii from all
// points drive its range), and each sample contributes both losses, so delta
// carries a paired standard error.
inline std::vector<MixtureScanRow> mixture_dominance_scan(const Model& model,
                                                          const MixtureDensity& mix,
                                                          const AlphaLoss& loss,
                                                          std::span<const double> theta_grid,
                                                          std::size_t n, std::uint64_t seed) {
    loss.validate();
    mix.validate();
    if (theta_grid.empty()) throw domain_error("mixture_dominance_scan: empty theta grid");
    if (n < 100) throw domain_error("mixture_dominance_scan: need n >= 100");
    std::vector<std::vector<double>> radii(theta_grid.size());
    double m_max = 0.0;
    for (std::size_t ti = 0; ti < theta_grid.size(); ++ti) {
        const auto th = detail::radial_point(model, theta_grid[ti]);
        radii[ti] = detail::sample_error_radii(model, mix.base, th, n, seed, ti);
        m_max = std::max(m_max, *std::max_element(radii[ti].begin(), radii[ti].end()));
    }
    const MixtureLossTable table(model, mix, loss, m_max);
    const bool kl = loss.is_kl();
    std::vector<MixtureScanRow> rows;
    rows.reserve(theta_grid.size());
    for (std::size_t ti = 0; ti < theta_grid.size(); ++ti) {
        MeanVar mix_acc, plug_acc, diff_acc;
        for (const double m : radii[ti]) {
            const double lm = table(m);
            const double lp =
                kl ? loss_kl_sq(model, m * m, 1.0) : loss_closed_sq(model, m * m, 1.0, loss);
            mix_acc.add(lm);
            plug_acc.add(lp);
            diff_acc.add(lm - lp);
        }
        MixtureScanRow row;
        row.theta_norm = theta_grid[ti];
        row.mixture = {mix_acc.mean(), mix_acc.stderr_mean(), n, seed};
        row.plugin = {plug_acc.mean(), plug_acc.stderr_mean(), n, seed};
        row.delta = diff_acc.mean();
        row.delta_se = diff_acc.stderr_mean();
        rows.push_back(row);
    }
    return rows;
}

} // namespace vexp
