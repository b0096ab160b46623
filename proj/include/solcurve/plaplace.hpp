#ifndef SOLCURVE_PLAPLACE_HPP
#define SOLCURVE_PLAPLACE_HPP

/// \file plaplace.hpp
/// Shoot-and-scale for radial p-Laplace Dirichlet problems. The naive mode
/// integrates the r-form
///   u'' + (n-1)/((p-1) r) u' + f(u)/((p-1)|u'|^{p-2}) = 0
/// from a small h with the series start u ~ alpha + a1 r^{p/(p-1)}; the
/// first root xi gives lambda = xi^p. The regularized mode substitutes
/// z = r^{p/(2(p-1))}, which makes the solution twice differentiable at the
/// origin, integrates
///   a u'' + (A/z) u' + z^{p-2} f(u)/((p-1)|u'|^{p-2}) = 0
/// and recovers lambda = z0^{2(p-1)} from the first root z0.

#include <cmath>
#include <stdexcept>
#include <string>

#include "solcurve/curve.hpp"
#include "solcurve/ode.hpp"
#include "solcurve/parallel.hpp"
#include "solcurve/problem.hpp"
#include "solcurve/shootscale.hpp"

namespace solcurve {

/// Constants of the regularizing substitution and the series start.
/// a1 comes from order-matching the transformed equation at z = 0:
///   a1 = -((p-1)/p) (f(alpha)/n)^{1/(p-1)},
/// and a2 from matching the z^2 order with |u'|^{p-2} expanded to first
/// order. At p = 2 they reduce to the classical -f/(2n) and
/// f f'/(8n(n+2)) of the Laplacian series.
struct RegularizedConstants {
    double beta_bar = 1.0;  // p / (2(p-1))
    double a = 1.0;         // beta_bar^p
    double A = 0.0;         // beta_bar^{p-1}(beta_bar - 1) + (n-1)/(p-1) beta_bar^{p-1}
    double a1 = 0.0;        // leading series coefficient, < 0 for f(alpha) > 0
    std::optional<double> a2;
};

inline RegularizedConstants regularize_constants(double p, int n, double alpha,
                                                 const Nonlinearity& f) {
    if (!(p > 1.0)) throw std::invalid_argument("regularize_constants: p must be > 1");
    if (n < 1) throw std::invalid_argument("regularize_constants: n must be >= 1");
    double fa = f.value(alpha);
    if (!(fa > 0.0))
        throw std::invalid_argument(
            "regularize_constants: positive-solution regime requires f(alpha) > 0");

    RegularizedConstants c;
    double pm1 = p - 1.0;
    c.beta_bar = p / (2.0 * pm1);
    c.a = std::pow(c.beta_bar, p);
    double bpow = std::pow(c.beta_bar, pm1);
    c.A = bpow * (c.beta_bar - 1.0) + (static_cast<double>(n) - 1.0) / pm1 * bpow;
    c.a1 = -(pm1 / p) * std::pow(fa / static_cast<double>(n), 1.0 / pm1);

    double denom = (p - 1.0) * std::pow(2.0 * std::abs(c.a1), p - 2.0) *
                   (12.0 * c.a + 4.0 * c.A + 4.0 * (p - 2.0) * (c.a + c.A));
    double a2 = -f.du(alpha) * c.a1 / denom;
    if (std::isfinite(a2)) c.a2 = a2;
    return c;
}

enum class PlaplaceMode { Regularized, Naive };

struct PlaplaceOptions {
    PlaplaceMode mode = PlaplaceMode::Regularized;
    double h_z = 1e-3;  // series start abscissa in z (regularized)
    double h_r = 1e-5;  // series start abscissa in r (naive)
    double tend = 1000.0;
    ode::Tolerances tol{};
    double event_tol = 1e-12;
    int jobs = 1;
};

inline ShootResult plaplace_shoot(const ProblemSpec& problem, double alpha,
                                  const PlaplaceOptions& opts = {}) {
    if (!(alpha > 0.0)) throw std::invalid_argument("plaplace_shoot: alpha must be positive");
    const double p = problem.p;
    if (opts.mode == PlaplaceMode::Regularized && p < 2.0)
        throw std::invalid_argument("plaplace_shoot: regularized mode requires p >= 2");
    if (!(p > 1.0)) throw std::invalid_argument("plaplace_shoot: p must be > 1");

    const Nonlinearity f = problem.f;
    const double pm1 = p - 1.0;
    RegularizedConstants c = regularize_constants(p, problem.n, alpha, f);

    ShootResult res;
    res.alpha = alpha;

    ode::IvpSystem sys;
    sys.dim = 2;
    sys.t_end = opts.tend;

    if (opts.mode == PlaplaceMode::Regularized) {
        double a = c.a, A = c.A;
        sys.rhs = [f, a, A, p, pm1](double z, std::span<const double> y, std::span<double> dy) {
            double w = std::abs(y[1]);
            double ratio = std::pow(z / w, p - 2.0);  // z^{p-2}/|u'|^{p-2}
            dy[0] = y[1];
            dy[1] = -A / (a * z) * y[1] - ratio * f.value(y[0]) / (a * pm1);
        };
        double h = opts.h_z;
        double a2 = 0.0;
        if (c.a2) {
            a2 = *c.a2;
        } else {
            h *= 0.1;  // a1-only fallback
        }
        sys.t0 = h;
        sys.y0 = {alpha + c.a1 * h * h + a2 * h * h * h * h,
                  2.0 * c.a1 * h + 4.0 * a2 * h * h * h};
    } else {
        double nm1 = static_cast<double>(problem.n - 1);
        sys.rhs = [f, nm1, p, pm1](double r, std::span<const double> y, std::span<double> dy) {
            double w = std::abs(y[1]);
            dy[0] = y[1];
            dy[1] = -nm1 / (pm1 * r) * y[1] - f.value(y[0]) / (pm1 * std::pow(w, p - 2.0));
        };
        double h = opts.h_r;
        double m = p / pm1;  // r-exponent of the leading series term
        sys.t0 = h;
        sys.y0 = {alpha + c.a1 * std::pow(h, m), c.a1 * m * std::pow(h, m - 1.0)};
    }

    sys.events.push_back({[](double, std::span<const double> y) { return y[0]; },
                          ode::EventDirection::Decreasing, sys.t0});

    res.trajectory = ode::integrate(sys, opts.tol, opts.event_tol);
    const auto& traj = res.trajectory;
    switch (traj.status) {
        case ode::IntegrationStatus::EventTriggered: {
            res.kind = ShootKind::VRoot;
            res.r_star = traj.first_event->t;
            res.lambda = opts.mode == PlaplaceMode::Regularized
                             ? std::pow(res.r_star, 2.0 * pm1)
                             : std::pow(res.r_star, p);
            break;
        }
        case ode::IntegrationStatus::ReachedEnd:
            res.kind = ShootKind::NoEvent;
            res.note = "no root by tend";
            break;
        case ode::IntegrationStatus::NonFiniteRhs:
        case ode::IntegrationStatus::StepUnderflow:
            res.kind = ShootKind::NoEvent;
            res.note = traj.error;
            break;
    }
    return res;
}

/// Grid sweep; keeps first-root points with lambda recovered per mode.
inline SolutionCurve plaplace_curve(const ProblemSpec& problem, double alpha0, double d_alpha,
                                    int nsteps, const PlaplaceOptions& opts = {}) {
    if (!(d_alpha > 0.0)) throw std::invalid_argument("plaplace_curve: d_alpha must be positive");
    if (nsteps < 1) throw std::invalid_argument("plaplace_curve: nsteps must be >= 1");
    problem.validate();

    struct Slot {
        ShootKind kind;
        double alpha, lambda;
        std::string note;
    };
    std::vector<Slot> raw(static_cast<std::size_t>(nsteps));
    parallel_for(static_cast<std::size_t>(nsteps), opts.jobs, [&](std::size_t i) {
        double alpha = alpha0 + d_alpha * static_cast<double>(i + 1);
        ShootResult r = plaplace_shoot(problem, alpha, opts);
        raw[i] = {r.kind, alpha, r.lambda, r.note};
    });

    std::vector<CurvePoint> accepted;
    std::vector<std::size_t> forced_breaks;
    CurveMeta meta;
    meta.grid_start = alpha0;
    meta.grid_step = d_alpha;
    meta.grid_count = nsteps;
    meta.tol_rel = opts.tol.rel;
    meta.tol_abs = opts.tol.abs;
    meta.event_tol = opts.event_tol;
    meta.eps_start = opts.mode == PlaplaceMode::Regularized ? opts.h_z : opts.h_r;
    meta.tend = opts.tend;
    if (problem.p < 2.0)
        meta.warnings.push_back(
            "p < 2: naive mode only; nonlinear term is non-Lipschitz at u' = 0");

    bool gap_pending = false;
    for (const auto& pt : raw) {
        if (pt.kind == ShootKind::VRoot) {
            if (gap_pending && !accepted.empty()) forced_breaks.push_back(accepted.size());
            accepted.push_back({pt.alpha, pt.lambda, {}, {}, Terminal::DirichletRoot, {}});
            gap_pending = false;
        } else {
            meta.rejected.push_back({pt.alpha, pt.lambda, {}, {}, Terminal::NoEventByTend, {}});
            if (!pt.note.empty())
                meta.warnings.push_back("alpha = " + std::to_string(pt.alpha) + ": " + pt.note);
            gap_pending = true;
        }
    }

    SolutionCurve curve = split_branches_adaptive(std::move(accepted), forced_breaks);
    curve.problem = problem;
    curve.meta = std::move(meta);
    return curve;
}

}  // namespace solcurve

#endif  // SOLCURVE_PLAPLACE_HPP
