#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vexp/errors.hpp"
#include "vexp/model.hpp"
#include "vexp/parallel.hpp"
#include "vexp/rng.hpp"

namespace vexp {

// Point-estimator catalog.  All built-in shrinkage kinds are orthogonally
// equivariant, which is what lets every downstream inf/sup over theta run on
// a radial grid.
struct Estimator {
    enum class Kind {
        identity,          // X
        affine,            // aX, 0 < a <= 1
        truncated_nonneg,  // max(X, 0) componentwise (closed-form risk: d = 1 only)
        james_stein,       // (1 - (d-2) sigma_x2 / ||x||^2) x, d >= 3
        james_stein_plus,  // positive-part James-Stein
        baranchik,         // (1 - s(||x||^2) / ||x||^2) x
        custom,
    };
    using CustomFn = std::function<void(std::span<const double>, std::span<double>, const Model&)>;

    Kind kind = Kind::identity;
    double a = 1.0;                        // affine coefficient
    std::function<double(double)> s_fn;    // Baranchik s(t), t = ||x||^2
    CustomFn custom_fn;
    std::string descriptor = "identity";

    static Estimator identity() { return {}; }

    static Estimator affine(double a) {
        if (!(a > 0.0 && a <= 1.0)) throw domain_error("Estimator::affine: need 0 < a <= 1");
        Estimator e;
        e.kind = Kind::affine;
        e.a = a;
        char tag[48];
        std::snprintf(tag, sizeof(tag), "affine:%.12g", a);
        e.descriptor = tag;
        return e;
    }

    static Estimator truncated_nonneg() {
        Estimator e;
        e.kind = Kind::truncated_nonneg;
        e.descriptor = "truncated";
        return e;
    }

    static Estimator james_stein() {
        Estimator e;
        e.kind = Kind::james_stein;
        e.descriptor = "js";
        return e;
    }

    static Estimator james_stein_plus() {
        Estimator e;
        e.kind = Kind::james_stein_plus;
        e.descriptor = "jsplus";
        return e;
    }

    static Estimator baranchik(std::function<double(double)> s, std::string desc) {
        Estimator e;
        e.kind = Kind::baranchik;
        e.s_fn = std::move(s);
        e.descriptor = "baranchik:" + desc;
        return e;
    }

    static Estimator custom(CustomFn fn, std::string desc) {
        Estimator e;
        e.kind = Kind::custom;
        e.custom_fn = std::move(fn);
        e.descriptor = "custom:" + desc;
        return e;
    }
};

// theta_hat(x).  ||x|| = 0 for the shrinkage kinds returns 0 (the limiting
// shrink-to-zero convention; a measure-zero event under the sampling model).
inline void evaluate(const Estimator& est, std::span<const double> x, std::span<double> out,
                     const Model& model) {
    const std::size_t d = x.size();
    if (out.size() != d || d != static_cast<std::size_t>(model.d))
        throw domain_error("evaluate: dimension mismatch");
    switch (est.kind) {
    case Estimator::Kind::identity:
        for (std::size_t i = 0; i < d; ++i) out[i] = x[i];
        return;
    case Estimator::Kind::affine:
        for (std::size_t i = 0; i < d; ++i) out[i] = est.a * x[i];
        return;
    case Estimator::Kind::truncated_nonneg:
        for (std::size_t i = 0; i < d; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
        return;
    case Estimator::Kind::james_stein:
    case Estimator::Kind::james_stein_plus: {
        if (model.d < 3) throw domain_error("evaluate: James-Stein kinds require d >= 3");
        double t = 0.0;
        for (const double v : x) t += v * v;
        if (t == 0.0) {
            for (auto& v : out) v = 0.0;
            return;
        }
        double factor = 1.0 - (model.d - 2) * model.sigma_x2 / t;
        if (est.kind == Estimator::Kind::james_stein_plus && factor < 0.0) factor = 0.0;
        for (std::size_t i = 0; i < d; ++i) out[i] = factor * x[i];
        return;
    }
    case Estimator::Kind::baranchik: {
        double t = 0.0;
        for (const double v : x) t += v * v;
        if (t == 0.0) {
            for (auto& v : out) v = 0.0;
            return;
        }
        const double s = est.s_fn(t);
        if (!(s >= 0.0)) throw domain_error("evaluate: Baranchik s(t) must be >= 0");
        const double factor = 1.0 - s / t;
        for (std::size_t i = 0; i < d; ++i) out[i] = factor * x[i];
        return;
    }
    case Estimator::Kind::custom:
        est.custom_fn(x, out, model);
        return;
    }
    throw domain_error("evaluate: unknown estimator kind");
}

// True when the frequentist risk of the expanded plug-in has a closed form.
inline bool has_closed_risk(const Estimator& est, const Model& model) {
    switch (est.kind) {
    case Estimator::Kind::identity:
    case Estimator::Kind::affine:
        return true;
    case Estimator::Kind::truncated_nonneg:
        return model.d == 1;
    default:
        return false;
    }
}

// Search set for infima/suprema over the parameter space: a grid of
// ||theta|| values (a ray suffices for the equivariant catalog; supply an
// explicit grid for anything else).
struct ThetaSpace {
    std::vector<double> radii;
    bool auto_extend = true; // permit doubling of the max radius until profiles flatten

    static ThetaSpace radial(double max_radius, int points) {
        if (points < 2 || !(max_radius > 0.0))
            throw domain_error("ThetaSpace::radial: need points >= 2 and max_radius > 0");
        ThetaSpace s;
        s.radii.resize(points);
        for (int i = 0; i < points; ++i)
            s.radii[i] = max_radius * static_cast<double>(i) / (points - 1);
        return s;
    }

    // default: [0, 8 sigma_x] in sigma_x/2 steps
    static ThetaSpace radial_default(const Model& model) {
        return radial(8.0 * model.sigma_x(), 17);
    }

    static ThetaSpace explicit_grid(std::vector<double> radii) {
        if (radii.empty()) throw domain_error("ThetaSpace: grid must be non-empty");
        ThetaSpace s;
        s.radii = std::move(radii);
        s.auto_extend = false;
        return s;
    }
};

// Normalized moment bounds feeding the general cut-off machinery:
// b0 <= E||theta_hat - theta||^2 / sigma_y2 <= b1,  E||..||^4 / sigma_y4 <= b2.
struct MomentBounds {
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    std::string provenance; // "analytic" or "monte-carlo"
};

// E||theta_hat - theta||^4 <= M2^2 + d M1 given componentwise quartic and
// total quadratic bounds (M1 >= sum_i E(theta_hat_i - theta_i)^4,
// M2 >= E||theta_hat - theta||^2).
inline double quartic_bound_from_componentwise(double m1, double m2, int d) {
    if (!(m1 >= 0.0) || !(m2 >= 0.0))
        throw domain_error("quartic_bound_from_componentwise: need M1, M2 >= 0");
    return m2 * m2 + d * m1;
}

// Sample-moment version of the damped-expectation lower bound
// E(T e^{-sT}) >= E(T) exp(-s E(T^2)/E(T)) for nonnegative T.
inline double damped_moment_lower_bound(std::span<const double> t_samples, double s) {
    if (!(s > 0.0)) throw domain_error("damped_moment_lower_bound: need s > 0");
    double m1 = 0.0, m2 = 0.0;
    for (const double t : t_samples) {
        if (t < 0.0) throw domain_error("damped_moment_lower_bound: samples must be nonnegative");
        m1 += t;
        m2 += t * t;
    }
    const std::size_t n = t_samples.size();
    if (n == 0 || m1 == 0.0) throw domain_error("damped_moment_lower_bound: degenerate sample (E(T) = 0)");
    m1 /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    return m1 * std::exp(-s * m2 / m1);
}

// Damped-moment infimum for the identity estimator, in closed form:
// Z = ||X - theta||^2 / sigma_y2 is (r chi^2_d), theta-free, and
// E(Z e^{-sZ}) = r d (1 + 2 s r)^(-(d/2 + 1)) with s = (1 - alpha^2)/8.
inline double epsilon_identity(const Model& model, const AlphaLoss& loss) {
    loss.validate();
    const double s = (1.0 - loss.alpha * loss.alpha) / 8.0;
    const double r = model.r();
    return r * model.d * std::pow(1.0 + 2.0 * s * r, -(0.5 * model.d + 1.0));
}

namespace detail {

struct ThetaMoments {
    MeanVar z2;     // ||theta_hat - theta||^2 / sigma_y2
    MeanVar z4;     // squared
};

inline ThetaMoments sample_theta_moments(const Model& model, const Estimator& est, double radius,
                                         std::size_t n, std::uint64_t seed, std::uint64_t task_id) {
    const std::size_t chunks = num_chunks_for(n);
    std::vector<ThetaMoments> parts(chunks);
    parallel_for_chunks(chunks, [&](std::size_t ci) {
        RngStream rng = substream(seed, task_id, ci);
        const std::size_t count = std::min(mc_chunk_size, n - ci * mc_chunk_size);
        std::vector<double> x(model.d), th_hat(model.d);
        ThetaMoments local;
        const double sx = model.sigma_x();
        for (std::size_t i = 0; i < count; ++i) {
            for (int j = 0; j < model.d; ++j) x[j] = (j == 0 ? radius : 0.0) + sx * rng.normal();
            evaluate(est, x, th_hat, model);
            double z = 0.0;
            for (int j = 0; j < model.d; ++j) {
                const double diff = th_hat[j] - (j == 0 ? radius : 0.0);
                z += diff * diff;
            }
            z /= model.sigma_y2;
            local.z2.add(z);
            local.z4.add(z * z);
        }
        parts[ci] = local;
    });
    ThetaMoments total;
    for (const auto& p : parts) {
        total.z2.merge(p.z2);
        total.z4.merge(p.z4);
    }
    return total;
}

} // namespace detail

// Conservative normalized moment bounds over the search space: analytic for
// the identity estimator, otherwise Monte Carlo extrema over the grid with a
// 3-standard-error safety margin applied in the conservative direction for
// each bound (b0 down, b1/b2 up).
inline MomentBounds moment_bounds(const Estimator& est, const Model& model, const ThetaSpace& space,
                                  std::size_t budget_per_point, std::uint64_t seed) {
    const double r = model.r();
    if (est.kind == Estimator::Kind::identity) {
        // E||X - theta||^2 = d sigma_x2; E||X - theta||^4 = (d^2 + 2d) sigma_x4
        return {model.d * r, model.d * r, (model.d * model.d + 2.0 * model.d) * r * r, "analytic"};
    }
    if (space.radii.empty()) throw domain_error("moment_bounds: space grid must be non-empty");
    if (budget_per_point < 100) throw domain_error("moment_bounds: budget too small");
    double lo2 = 0.0, hi2 = 0.0, hi4 = 0.0;
    bool first = true;
    for (std::size_t gi = 0; gi < space.radii.size(); ++gi) {
        const auto m = detail::sample_theta_moments(model, est, space.radii[gi], budget_per_point,
                                                    seed, gi);
        const double lo = m.z2.mean() - 3.0 * m.z2.stderr_mean();
        const double hi = m.z2.mean() + 3.0 * m.z2.stderr_mean();
        const double q4 = m.z4.mean() + 3.0 * m.z4.stderr_mean();
        if (first || lo < lo2) lo2 = lo;
        if (first || hi > hi2) hi2 = hi;
        if (first || q4 > hi4) hi4 = q4;
        first = false;
    }
    if (!(lo2 > 0.0))
        throw inapplicable_error(
            "moment_bounds: quadratic risk indistinguishable from zero at this budget "
            "(degenerate estimator; the dominance machinery requires a non-degenerate one)");
    return {lo2, hi2, hi4, "monte-carlo"};
}

} // namespace vexp
