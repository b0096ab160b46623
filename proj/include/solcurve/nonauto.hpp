#ifndef SOLCURVE_NONAUTO_HPP
#define SOLCURVE_NONAUTO_HPP

/// \file nonauto.hpp
/// Newton continuation in alpha = u(0) for non-autonomous radial Dirichlet
/// problems: for each alpha solve F(lambda) = u(1) = 0, where u is the
/// shooting solution of
///   u'' + ((n-1)/r) u' + lambda f(r, u) = 0,  u(0) = alpha, u'(0) = 0,
/// with F' obtained exactly from the variational equation. Each grid point
/// is warm-started from the previous one.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "solcurve/curve.hpp"
#include "solcurve/ode.hpp"
#include "solcurve/problem.hpp"
#include "solcurve/quadrature.hpp"
#include "solcurve/shootscale.hpp"

namespace solcurve::nonauto {

struct NewtonOptions {
    double tol = 1e-10;     // on |u(1)|, relative to max(1, alpha)
    int max_iter = 25;
    int max_halvings = 8;
    double eps = 1e-8;      // series start abscissa
    ode::Tolerances tol_ode{};
};

/// Shooting IVP at fixed (lambda, alpha), integrated to r = 1.
inline ode::DenseTrajectory ivp_at(const ProblemSpec& problem, double lambda, double alpha,
                                   const NewtonOptions& opts = {}) {
    const Nonlinearity& f = problem.f;
    double nm1 = static_cast<double>(problem.n - 1);
    double nd = static_cast<double>(problem.n);

    ode::IvpSystem sys;
    sys.dim = 2;
    sys.rhs = [f, nm1, lambda](double r, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -nm1 / r * y[1] - lambda * f.value(r, y[0]);
    };
    double f0 = f.value(0.0, alpha);
    sys.t0 = opts.eps;
    sys.t_end = 1.0;
    sys.y0 = {alpha - lambda * f0 / (2.0 * nd) * opts.eps * opts.eps,
              -lambda * f0 / nd * opts.eps};
    return ode::integrate(sys, opts.tol_ode);
}

/// Variational trajectory u_lambda: the derivative of the shooting solution
/// with respect to lambda, driven by the dense output of u. Initial data
/// are the lambda-derivatives of the series start (numerically zero).
inline ode::DenseTrajectory variational_at(const ProblemSpec& problem, double lambda, double alpha,
                                           const ode::DenseTrajectory& u,
                                           const NewtonOptions& opts = {}) {
    const Nonlinearity& f = problem.f;
    double nm1 = static_cast<double>(problem.n - 1);
    double nd = static_cast<double>(problem.n);

    ode::IvpSystem sys;
    sys.dim = 2;
    sys.rhs = [f, nm1, lambda, &u](double r, std::span<const double> y, std::span<double> dy) {
        double ur = u.evaluate(r, 0);
        dy[0] = y[1];
        dy[1] = -nm1 / r * y[1] - lambda * f.du(r, ur) * y[0] - f.value(r, ur);
    };
    double f0 = f.value(0.0, alpha);
    sys.t0 = opts.eps;
    sys.t_end = 1.0;
    sys.y0 = {-f0 / (2.0 * nd) * opts.eps * opts.eps, -f0 / nd * opts.eps};
    return ode::integrate(sys, opts.tol_ode);
}

namespace detail {

struct Residual {
    double value;
    bool blow_up;
    ode::DenseTrajectory traj;
};

inline Residual eval_residual(const ProblemSpec& problem, double lambda, double alpha,
                              const NewtonOptions& opts) {
    Residual r{0.0, false, ivp_at(problem, lambda, alpha, opts)};
    if (r.traj.status == ode::IntegrationStatus::ReachedEnd) {
        r.value = r.traj.final_state()[0];
        return r;
    }
    // blow-up before r = 1: keep only the sign of the excursion, capped
    r.blow_up = true;
    double cap = 1e6 * std::max(1.0, std::abs(alpha));
    double last = r.traj.final_state().empty() ? -1.0 : r.traj.final_state()[0];
    r.value = std::isfinite(last) && last > 0.0 ? cap : -cap;
    return r;
}

}  // namespace detail

struct NewtonResult {
    double lambda = 0.0;
    NewtonReport report;
    ode::DenseTrajectory u;  // trajectory at the final lambda
};

/// Damped Newton iteration lambda <- lambda - F/F' with F = u(1) and
/// F' = u_lambda(1). Stops at |F| <= tol * max(1, alpha) or max_iter.
inline NewtonResult newton_lambda(const ProblemSpec& problem, double alpha, double lambda0,
                                  const NewtonOptions& opts = {}) {
    NewtonResult out;
    double scale = std::max(1.0, std::abs(alpha));
    double lambda = lambda0;

    detail::Residual cur = detail::eval_residual(problem, lambda, alpha, opts);
    // if the initial guess blows up, back off toward lambda = 0 where the
    // problem is linearly solvable
    for (int tries = 0; cur.blow_up && tries < 60; ++tries) {
        lambda *= 0.5;
        cur = detail::eval_residual(problem, lambda, alpha, opts);
    }
    out.report.iterates.emplace_back(lambda, std::abs(cur.value));

    for (int it = 0; it < opts.max_iter; ++it) {
        if (!cur.blow_up && std::abs(cur.value) <= opts.tol * scale) {
            out.report.converged = true;
            break;
        }
        ode::DenseTrajectory ul = variational_at(problem, lambda, alpha, cur.traj, opts);
        if (ul.status != ode::IntegrationStatus::ReachedEnd) {
            out.report.failure = "variational equation failed: " + ul.error;
            break;
        }
        double deriv = ul.final_state()[0];
        if (std::abs(deriv) < 1e-14) {
            out.report.failure = "singular derivative (fold in lambda at fixed alpha)";
            break;
        }
        double step = cur.value / deriv;
        double damping = 1.0;
        detail::Residual trial = detail::eval_residual(problem, lambda - step, alpha, opts);
        for (int halv = 0; halv < opts.max_halvings && std::abs(trial.value) >= std::abs(cur.value);
             ++halv) {
            damping *= 0.5;
            trial = detail::eval_residual(problem, lambda - damping * step, alpha, opts);
        }
        lambda -= damping * step;
        cur = std::move(trial);
        out.report.steps = it + 1;
        out.report.iterates.emplace_back(lambda, std::abs(cur.value));
    }
    if (!out.report.converged && out.report.failure.empty())
        out.report.failure = "no convergence in " + std::to_string(opts.max_iter) + " iterations";

    out.lambda = lambda;
    out.u = std::move(cur.traj);
    return out;
}

/// Integral-representation residual (kernel quadrature over the dense
/// output; composite 8-point Gauss-Legendre on 64 panels). Agrees with the
/// endpoint value u(1) and serves as the independent route for testing;
/// n = 2 uses the logarithmic kernel.
inline double residual_by_quadrature(const ProblemSpec& problem, double lambda, double alpha,
                                     const ode::DenseTrajectory& u) {
    const Nonlinearity& f = problem.f;
    double eps = u.t_begin();
    auto u_at = [&](double z) { return z < eps ? u.evaluate(eps, 0) : u.evaluate(z, 0); };
    int n = problem.n;
    if (n == 2) {
        // graded panels resolve the weak log singularity at z = 0
        double integral = quad::gauss_legendre_graded(
            [&](double z) { return z * std::log(z) * f.value(z, u_at(z)); }, 0.0, 1.0, 64);
        return alpha + lambda * integral;
    }
    double nm2 = static_cast<double>(n) - 2.0;
    double integral = quad::gauss_legendre(
        [&](double z) { return (std::pow(z, nm2) - 1.0) * z * f.value(z, u_at(z)); }, 0.0, 1.0,
        64);
    return alpha + lambda / nm2 * integral;
}

struct ContinuationOptions {
    NewtonOptions newton{};
    std::optional<double> lambda_init;  // bootstrap from shoot-and-scale when absent
};

/// Sequential alpha-sweep with warm starts. Failed points are recorded and
/// skipped; the sweep aborts only if the first point fails.
inline SolutionCurve continue_in_alpha(const ProblemSpec& problem, double alpha0, double d_alpha,
                                       int nsteps, const ContinuationOptions& copts = {}) {
    if (!(d_alpha > 0.0))
        throw std::invalid_argument("continue_in_alpha: d_alpha must be positive");
    if (nsteps < 1) throw std::invalid_argument("continue_in_alpha: nsteps must be >= 1");
    problem.validate();

    const NewtonOptions& opts = copts.newton;
    CurveMeta meta;
    meta.grid_start = alpha0;
    meta.grid_step = d_alpha;
    meta.grid_count = nsteps;
    meta.tol_rel = opts.tol_ode.rel;
    meta.tol_abs = opts.tol_ode.abs;
    meta.eps_start = opts.eps;

    if (problem.n > 1)
        meta.warnings.push_back(
            "n > 1: alpha is not guaranteed to be a global parameter; "
            "solutions off the computed curve may exist");
    if (problem.f.nonautonomous && problem.f.fr) {
        // sign condition f_r <= 0 sampled on a coarse grid
        double alpha_max = alpha0 + d_alpha * nsteps;
        bool violated = false;
        for (int ri = 0; ri <= 20 && !violated; ++ri)
            for (int ui = 0; ui <= 20 && !violated; ++ui) {
                double rr = ri / 20.0;
                double uu = alpha_max * ui / 20.0;
                if (problem.f.dr(rr, uu) > 1e-12) violated = true;
            }
        if (violated)
            meta.warnings.push_back(
                "f_r > 0 detected on the sampled grid; the sign condition for "
                "alpha to be a global parameter fails");
    }

    double lambda_warm;
    double alpha1 = alpha0 + d_alpha;
    if (copts.lambda_init) {
        lambda_warm = *copts.lambda_init;
    } else {
        // autonomous approximation f(0, u) solved by shoot-and-scale
        ProblemSpec frozen = problem;
        frozen.family = Family::RadialDirichlet;
        const Nonlinearity base = problem.f;
        frozen.f = catalog::make(
            "frozen", [base](double, double u) { return base.value(0.0, u); },
            [base](double, double u) { return base.du(0.0, u); });
        ShootOptions sopts;
        sopts.eps = opts.eps;
        sopts.tol = opts.tol_ode;
        ShootResult sr = shoot(frozen, alpha1, sopts);
        lambda_warm = sr.kind == ShootKind::VRoot ? sr.lambda : 1.0;
        if (sr.kind != ShootKind::VRoot)
            meta.warnings.push_back("bootstrap shoot found no root; starting Newton at lambda = 1");
    }

    std::vector<CurvePoint> accepted;
    std::vector<std::size_t> forced_breaks;
    bool gap_pending = false;
    for (int i = 1; i <= nsteps; ++i) {
        double alpha = alpha0 + d_alpha * static_cast<double>(i);
        NewtonResult nr = newton_lambda(problem, alpha, lambda_warm, opts);
        if (nr.report.converged) {
            CurvePoint cp;
            cp.alpha = alpha;
            cp.lambda = nr.lambda;
            cp.terminal = Terminal::DirichletRoot;
            cp.newton = nr.report;
            if (gap_pending && !accepted.empty()) forced_breaks.push_back(accepted.size());
            accepted.push_back(std::move(cp));
            gap_pending = false;
            lambda_warm = nr.lambda;
        } else {
            if (i == 1)
                throw FirstPointError("continue_in_alpha: first grid point failed (" +
                                      nr.report.failure + ")");
            CurvePoint cp;
            cp.alpha = alpha;
            cp.lambda = nr.lambda;
            cp.terminal = Terminal::NewtonFailed;
            cp.newton = nr.report;
            meta.rejected.push_back(std::move(cp));
            meta.warnings.push_back("alpha = " + std::to_string(alpha) + ": " +
                                    nr.report.failure);
            gap_pending = true;
        }
    }

    SolutionCurve curve = split_branches_adaptive(std::move(accepted), forced_breaks);
    curve.problem = problem;
    curve.meta = std::move(meta);
    return curve;
}

}  // namespace solcurve::nonauto

#endif  // SOLCURVE_NONAUTO_HPP
