#ifndef SOLCURVE_BEAM_HPP
#define SOLCURVE_BEAM_HPP

/// \file beam.hpp
/// Two-parameter Newton continuation for the clamped beam
///   u'''' = lambda f(u) on (-1, 1), u(+-1) = u'(+-1) = 0.
/// Positive solutions are even, so the computation runs on the half
/// interval [0, 1] with initial data u(0) = alpha, u'(0) = 0,
/// u''(0) = beta <= 0, u'''(0) = 0, and Newton solves
/// F(lambda, beta) = u(1) = 0, G(lambda, beta) = u'(1) = 0 using the exact
/// Jacobian from the two variational systems.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "solcurve/curve.hpp"
#include "solcurve/ode.hpp"
#include "solcurve/problem.hpp"

namespace solcurve::beam {

struct BeamOptions {
    double tol = 1e-10;  // on max(|F|, |G|), relative to max(1, alpha)
    int max_iter = 25;
    int max_halvings = 8;
    double det_guard = 1e-14;
    ode::Tolerances tol_ode{};
};

/// Shooting IVP for the half-beam, integrated on [0, 1]; no singularity,
/// the start is at x = 0 exactly. State: (u, u', u'', u''').
inline ode::DenseTrajectory beam_ivp(double lambda, double beta, double alpha,
                                     const Nonlinearity& f, const BeamOptions& opts = {}) {
    ode::IvpSystem sys;
    sys.dim = 4;
    sys.rhs = [f, lambda](double x, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = y[3];
        dy[3] = lambda * f.value(x, y[0]);
    };
    sys.t0 = 0.0;
    sys.t_end = 1.0;
    sys.y0 = {alpha, 0.0, beta, 0.0};
    return ode::integrate(sys, opts.tol_ode);
}

namespace detail {

struct Residual {
    double F, G;
    bool blow_up;
    ode::DenseTrajectory traj;
};

inline Residual eval_residual(double lambda, double beta, double alpha, const Nonlinearity& f,
                              const BeamOptions& opts) {
    Residual r{0.0, 0.0, false, beam_ivp(lambda, beta, alpha, f, opts)};
    if (r.traj.status == ode::IntegrationStatus::ReachedEnd) {
        r.F = r.traj.final_state()[0];
        r.G = r.traj.final_state()[1];
        return r;
    }
    r.blow_up = true;
    double cap = 1e6 * std::max(1.0, std::abs(alpha));
    double u_last = r.traj.final_state().empty() ? 1.0 : r.traj.final_state()[0];
    double s = std::isfinite(u_last) && u_last < 0.0 ? -1.0 : 1.0;
    r.F = s * cap;
    r.G = s * cap;
    return r;
}

}  // namespace detail

/// Boundary residuals read from the trajectory endpoint; equal to the
/// integral forms of the fourth-order representation formula.
inline std::pair<double, double> beam_residual(double lambda, double beta, double alpha,
                                               const Nonlinearity& f,
                                               const BeamOptions& opts = {}) {
    auto r = detail::eval_residual(lambda, beta, alpha, f, opts);
    return {r.F, r.G};
}

struct Jacobian2 {
    double f_lambda = 0.0, f_beta = 0.0;
    double g_lambda = 0.0, g_beta = 0.0;
    double det() const { return f_lambda * g_beta - f_beta * g_lambda; }
};

/// Exact Jacobian of (F, G) in (lambda, beta) from the variational IVPs
///   u_l'''' = f(u_n) + lambda f'(u_n) u_l,  zero initial data,
///   u_b'''' = lambda f'(u_n) u_b,           u_b''(0) = 1, others zero,
/// evaluated at the endpoints.
inline Jacobian2 beam_jacobian(double lambda, double beta, double alpha, const Nonlinearity& f,
                               const ode::DenseTrajectory& u, const BeamOptions& opts = {}) {
    (void)beta;
    (void)alpha;
    auto make = [&](bool lambda_dir) {
        ode::IvpSystem sys;
        sys.dim = 4;
        sys.rhs = [f, lambda, &u, lambda_dir](double x, std::span<const double> y,
                                              std::span<double> dy) {
            double un = u.evaluate(x, 0);
            dy[0] = y[1];
            dy[1] = y[2];
            dy[2] = y[3];
            dy[3] = lambda * f.du(x, un) * y[0] + (lambda_dir ? f.value(x, un) : 0.0);
        };
        sys.t0 = 0.0;
        sys.t_end = 1.0;
        sys.y0 = lambda_dir ? std::vector<double>{0.0, 0.0, 0.0, 0.0}
                            : std::vector<double>{0.0, 0.0, 1.0, 0.0};
        return ode::integrate(sys, opts.tol_ode);
    };
    ode::DenseTrajectory ul = make(true);
    ode::DenseTrajectory ub = make(false);
    Jacobian2 j;
    j.f_lambda = ul.final_state()[0];
    j.g_lambda = ul.final_state()[1];
    j.f_beta = ub.final_state()[0];
    j.g_beta = ub.final_state()[1];
    return j;
}

struct BeamState {
    double alpha = 0.0, lambda = 0.0, beta = 0.0;
    Jacobian2 jacobian;
    NewtonReport report;
    ode::DenseTrajectory u;
};

/// Full Newton on (F, G): solve the shooting IVP, the two variational
/// IVPs, assemble the 2x2 system and update, damping the step when the
/// residual norm fails to decrease.
inline BeamState beam_newton(double alpha, double lambda0, double beta0, const Nonlinearity& f,
                             const BeamOptions& opts = {}) {
    BeamState out;
    out.alpha = alpha;
    double scale = std::max(1.0, std::abs(alpha));
    double lambda = lambda0, beta = beta0;

    auto norm = [](const detail::Residual& r) { return std::max(std::abs(r.F), std::abs(r.G)); };

    detail::Residual cur = detail::eval_residual(lambda, beta, alpha, f, opts);
    for (int tries = 0; cur.blow_up && tries < 60; ++tries) {
        lambda *= 0.5;  // back off toward the solvable linear regime
        cur = detail::eval_residual(lambda, beta, alpha, f, opts);
    }
    out.report.iterates.emplace_back(lambda, norm(cur));

    for (int it = 0; it < opts.max_iter; ++it) {
        if (!cur.blow_up && norm(cur) <= opts.tol * scale) {
            out.report.converged = true;
            break;
        }
        Jacobian2 j = beam_jacobian(lambda, beta, alpha, f, cur.traj, opts);
        double det = j.det();
        if (std::abs(det) <= opts.det_guard) {
            out.report.failure = "singular Jacobian";
            break;
        }
        double d_lambda = (cur.F * j.g_beta - cur.G * j.f_beta) / det;
        double d_beta = (cur.G * j.f_lambda - cur.F * j.g_lambda) / det;
        double damping = 1.0;
        detail::Residual trial =
            detail::eval_residual(lambda - d_lambda, beta - d_beta, alpha, f, opts);
        for (int halv = 0; halv < opts.max_halvings && norm(trial) >= norm(cur); ++halv) {
            damping *= 0.5;
            trial = detail::eval_residual(lambda - damping * d_lambda, beta - damping * d_beta,
                                          alpha, f, opts);
        }
        lambda -= damping * d_lambda;
        beta -= damping * d_beta;
        cur = std::move(trial);
        out.jacobian = j;
        out.report.steps = it + 1;
        out.report.iterates.emplace_back(lambda, norm(cur));
    }
    if (!out.report.converged && out.report.failure.empty())
        out.report.failure = "no convergence in " + std::to_string(opts.max_iter) + " iterations";
    if (out.report.converged)
        out.jacobian = beam_jacobian(lambda, beta, alpha, f, cur.traj, opts);

    out.lambda = lambda;
    out.beta = beta;
    out.u = std::move(cur.traj);
    return out;
}

/// First-point seed from the small-alpha linearization u'''' ~ lambda f(0):
/// (lambda, beta) = (24 alpha / f(0), -4 alpha); exact for constant f.
inline std::pair<double, double> bootstrap_start(double alpha, const Nonlinearity& f) {
    double f0 = f.value(0.0, 0.0);
    if (!(f0 > 0.0)) f0 = 1.0;
    return {24.0 * alpha / f0, -4.0 * alpha};
}

struct BeamCurveOptions {
    BeamOptions newton{};
    std::optional<std::pair<double, double>> start;  // (lambda0, beta0) for the first point
};

/// Sequential warm-started alpha-sweep storing (alpha, lambda, beta).
inline SolutionCurve beam_curve(double alpha0, double d_alpha, int nsteps, const Nonlinearity& f,
                                const BeamCurveOptions& copts = {}) {
    if (!(d_alpha > 0.0)) throw std::invalid_argument("beam_curve: d_alpha must be positive");
    if (nsteps < 1) throw std::invalid_argument("beam_curve: nsteps must be >= 1");

    const BeamOptions& opts = copts.newton;
    CurveMeta meta;
    meta.grid_start = alpha0;
    meta.grid_step = d_alpha;
    meta.grid_count = nsteps;
    meta.tol_rel = opts.tol_ode.rel;
    meta.tol_abs = opts.tol_ode.abs;

    if (f.nonautonomous)
        meta.warnings.push_back(
            "non-autonomous f(x, u): u(0) is not known to be a global parameter; "
            "solutions off the computed curve may exist");

    // does f satisfy the positivity/monotonicity assumption on the range?
    double alpha_max = alpha0 + d_alpha * nsteps;
    bool positive_increasing = true;
    for (int i = 1; i <= 50 && positive_increasing; ++i) {
        double uu = alpha_max * i / 50.0;
        if (!(f.value(0.0, uu) > 0.0) || !(f.du(0.0, uu) > 0.0)) positive_increasing = false;
    }

    double alpha1 = alpha0 + d_alpha;
    auto [lambda_warm, beta_warm] = copts.start ? *copts.start : bootstrap_start(alpha1, f);

    std::vector<CurvePoint> accepted;
    std::vector<std::size_t> forced_breaks;
    bool gap_pending = false;
    for (int i = 1; i <= nsteps; ++i) {
        double alpha = alpha0 + d_alpha * static_cast<double>(i);
        BeamState st = beam_newton(alpha, lambda_warm, beta_warm, f, opts);
        if (st.report.converged) {
            if (positive_increasing && st.beta > 1e-12)
                meta.warnings.push_back("alpha = " + std::to_string(alpha) +
                                        ": converged with beta > 0 despite f > 0, f' > 0");
            CurvePoint cp;
            cp.alpha = alpha;
            cp.lambda = st.lambda;
            cp.beta = st.beta;
            cp.terminal = Terminal::DirichletRoot;
            cp.newton = st.report;
            if (gap_pending && !accepted.empty()) forced_breaks.push_back(accepted.size());
            accepted.push_back(std::move(cp));
            gap_pending = false;
            lambda_warm = st.lambda;
            beta_warm = st.beta;
        } else {
            if (i == 1)
                throw FirstPointError("beam_curve: first grid point failed (" + st.report.failure +
                                      ")");
            CurvePoint cp;
            cp.alpha = alpha;
            cp.lambda = st.lambda;
            cp.beta = st.beta;
            cp.terminal = Terminal::NewtonFailed;
            cp.newton = st.report;
            meta.rejected.push_back(std::move(cp));
            meta.warnings.push_back("alpha = " + std::to_string(alpha) + ": " +
                                    st.report.failure);
            gap_pending = true;
        }
    }

    SolutionCurve curve = split_branches_adaptive(std::move(accepted), forced_breaks);
    curve.problem.family = Family::ClampedBeam;
    curve.problem.f = f;
    curve.meta = std::move(meta);
    return curve;
}

}  // namespace solcurve::beam

#endif  // SOLCURVE_BEAM_HPP
