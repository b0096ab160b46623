#ifndef SOLCURVE_HARMONIC_HPP
#define SOLCURVE_HARMONIC_HPP

/// \file harmonic.hpp
/// Continuation in the k-th Fourier harmonic for
///   u'' + f(u) = mu sin(kx) + e(x),  0 < x < pi,  u(0) = u(pi) = 0,
/// k in {1, 2}. The harmonic xi = int_0^pi u sin(kx) dx is the continuation
/// parameter and the forcing amplitude mu is an unknown. Each Newton step
/// linearizes f and solves the constrained linear problem from three IVPs
/// (particular solutions for sin(kx) and for the inhomogeneity, plus one
/// homogeneous solution) and a 2x2 system for (mu, c1). Roots of mu(xi)
/// are solutions of the unforced problem.

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "solcurve/curve.hpp"
#include "solcurve/ode.hpp"
#include "solcurve/problem.hpp"
#include "solcurve/quadrature.hpp"

namespace solcurve::harmonic {

inline constexpr double pi = std::numbers::pi;

/// Resonance of the linearized operator: the 2x2 system for (mu, c1) is
/// numerically singular (u1(pi) ~ 0 with a degenerate harmonic row).
class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HarmonicOptions {
    int newton_steps = 3;       // fixed count per xi, per the continuation recipe
    int max_newton_steps = 10;  // extended when the residual check fails
    double residual_tol = 1e-7;
    double mu_root_tol = 1e-9;
    std::size_t quad_panels = 64;  // composite GL-8 panels for the sin(kx) integrals
    ode::Tolerances tol_ode{};
    enum class WarmStart {
        Previous,  // previous solution; first point uses xi * sin(kx)
        ModeShape  // sin(kx) at every grid point (branch-jumping strategy)
    } warm = WarmStart::Previous;
};

/// u = mu Y1 + Y2 + c1 u1 as dense trajectories plus coefficients.
struct LinearCombo {
    std::shared_ptr<const ode::DenseTrajectory> Y1, Y2, u1;
    double mu = 0.0, c1 = 0.0;

    double eval(double x) const {
        return mu * Y1->evaluate(x, 0) + Y2->evaluate(x, 0) + c1 * u1->evaluate(x, 0);
    }
    double eval_prime(double x) const {
        return mu * Y1->evaluate(x, 1) + Y2->evaluate(x, 1) + c1 * u1->evaluate(x, 1);
    }
    double uprime0() const { return mu + 1.0 + c1; }  // all three IVP slopes are 1
};

namespace detail {

inline ode::DenseTrajectory solve_ivp(const std::function<double(double)>& a,
                                      const std::function<double(double)>& rhs,
                                      const ode::Tolerances& tol) {
    ode::IvpSystem sys;
    sys.dim = 2;
    sys.rhs = [&a, &rhs](double x, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -a(x) * y[0] + rhs(x);
    };
    sys.t0 = 0.0;
    sys.t_end = pi;
    sys.y0 = {0.0, 1.0};
    ode::DenseTrajectory t = ode::integrate(sys, tol);
    if (t.status != ode::IntegrationStatus::ReachedEnd)
        throw SingularSystem("linear IVP failed: " + t.error);
    return t;
}

inline double sin_k_integral(const ode::DenseTrajectory& traj, int k, std::size_t panels) {
    return quad::gauss_legendre(
        [&traj, k](double x) { return traj.evaluate(x, 0) * std::sin(k * x); }, 0.0, pi, panels);
}

}  // namespace detail

/// Solves u'' + a(x) u = mu sin(kx) + g(x), u(0) = u(pi) = 0,
/// int_0^pi u sin(kx) dx = xi for (u, mu). Throws SingularSystem at
/// resonance of the linearized operator.
inline LinearCombo linear_solve(const std::function<double(double)>& a,
                                const std::function<double(double)>& g, double xi, int k,
                                const HarmonicOptions& opts = {}) {
    if (k != 1 && k != 2) throw std::invalid_argument("linear_solve: k must be 1 or 2");

    LinearCombo combo;
    combo.Y1 = std::make_shared<ode::DenseTrajectory>(
        detail::solve_ivp(a, [k](double x) { return std::sin(k * x); }, opts.tol_ode));
    combo.Y2 = std::make_shared<ode::DenseTrajectory>(detail::solve_ivp(a, g, opts.tol_ode));
    combo.u1 = std::make_shared<ode::DenseTrajectory>(
        detail::solve_ivp(a, [](double) { return 0.0; }, opts.tol_ode));

    // u(pi) = 0 and the harmonic constraint give a 2x2 system for (mu, c1)
    double a11 = combo.Y1->evaluate(pi, 0);
    double a12 = combo.u1->evaluate(pi, 0);
    double b1 = -combo.Y2->evaluate(pi, 0);
    double a21 = detail::sin_k_integral(*combo.Y1, k, opts.quad_panels);
    double a22 = detail::sin_k_integral(*combo.u1, k, opts.quad_panels);
    double b2 = xi - detail::sin_k_integral(*combo.Y2, k, opts.quad_panels);

    double det = a11 * a22 - a12 * a21;
    double amax = std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22), 1e-150});
    if (std::abs(det) < 1e-12 * amax * amax)
        throw SingularSystem("resonant linearized operator: singular (mu, c1) system");

    combo.mu = (b1 * a22 - b2 * a12) / det;
    combo.c1 = (a11 * b2 - a21 * b1) / det;
    return combo;
}

struct HarmonicSolution {
    double xi = 0.0;
    double mu = 0.0;
    double uprime0 = 0.0;
    double c1 = 0.0;
    int k = 1;
    LinearCombo combo;        // dense profile u(x) on [0, pi]
    double residual = 0.0;    // sampled BVP residual at acceptance
    NewtonReport report;
};

namespace detail {

/// Newton iteration at fixed xi. Runs `newton_steps` iterations, then up to
/// max_newton_steps while the sampled BVP residual exceeds residual_tol.
inline HarmonicSolution newton_at_xi(const Nonlinearity& f,
                                     const std::function<double(double)>& e, int k, double xi,
                                     std::function<double(double)> u0,
                                     const HarmonicOptions& opts) {
    HarmonicSolution sol;
    sol.xi = xi;
    sol.k = k;

    std::function<double(double)> u_prev = std::move(u0);
    for (int step = 1; step <= opts.max_newton_steps; ++step) {
        auto a = [&f, u_prev](double x) { return f.du(0.0, u_prev(x)); };
        auto g = [&f, &e, u_prev](double x) {
            double up = u_prev(x);
            return -f.value(0.0, up) + f.du(0.0, up) * up + e(x);
        };
        LinearCombo combo;
        try {
            combo = linear_solve(a, g, xi, k, opts);
        } catch (const SingularSystem& ex) {
            sol.report.failure = ex.what();
            return sol;
        }

        // BVP residual of the new iterate: by construction it equals the
        // linearization error f(u_new) - f(u_old) - f'(u_old)(u_new - u_old)
        double res = 0.0;
        for (int s = 0; s <= 200; ++s) {
            double x = pi * s / 200.0;
            double un = combo.eval(x), uo = u_prev(x);
            double lin_err = f.value(0.0, un) - f.value(0.0, uo) - f.du(0.0, uo) * (un - uo);
            res = std::max(res, std::abs(lin_err));
        }

        sol.combo = combo;
        sol.mu = combo.mu;
        sol.c1 = combo.c1;
        sol.uprime0 = combo.uprime0();
        sol.residual = res;
        sol.report.steps = step;
        sol.report.iterates.emplace_back(combo.mu, res);
        u_prev = [combo](double x) { return combo.eval(x); };

        if (step >= opts.newton_steps && res <= opts.residual_tol) {
            sol.report.converged = true;
            return sol;
        }
    }
    if (sol.residual <= opts.residual_tol) {
        sol.report.converged = true;
    } else {
        sol.report.failure = "residual " + std::to_string(sol.residual) +
                             " above tolerance after " +
                             std::to_string(opts.max_newton_steps) + " iterations";
    }
    return sol;
}

inline std::function<double(double)> zero_forcing() {
    return [](double) { return 0.0; };
}

}  // namespace detail

struct XiSweep {
    std::vector<HarmonicSolution> points;  // accepted, in grid order
    SolutionCurve curve;                   // (xi, mu, u'(0)) view with branches
};

/// Warm-started sweep over xi_i = xi0 + i d_xi, i = 1..nsteps.
inline XiSweep continue_in_xi(const Nonlinearity& f, std::function<double(double)> e, int k,
                              double xi0, double d_xi, int nsteps,
                              const HarmonicOptions& opts = {}) {
    if (nsteps < 1) throw std::invalid_argument("continue_in_xi: nsteps must be >= 1");
    if (!e) e = detail::zero_forcing();

    XiSweep sweep;
    CurveMeta meta;
    meta.grid_start = xi0;
    meta.grid_step = d_xi;
    meta.grid_count = nsteps;
    meta.tol_rel = opts.tol_ode.rel;
    meta.tol_abs = opts.tol_ode.abs;

    std::optional<LinearCombo> previous;
    std::vector<CurvePoint> accepted;
    std::vector<std::size_t> forced_breaks;
    bool gap_pending = false;
    for (int i = 1; i <= nsteps; ++i) {
        double xi = xi0 + d_xi * static_cast<double>(i);
        std::function<double(double)> u0;
        if (opts.warm == HarmonicOptions::WarmStart::ModeShape) {
            u0 = [k](double x) { return std::sin(k * x); };
        } else if (previous) {
            LinearCombo c = *previous;
            u0 = [c](double x) { return c.eval(x); };
        } else {
            u0 = [xi, k](double x) { return xi * std::sin(k * x); };
        }
        HarmonicSolution sol = detail::newton_at_xi(f, e, k, xi, std::move(u0), opts);
        if (sol.report.converged) {
            previous = sol.combo;
            CurvePoint cp;
            cp.alpha = xi;
            cp.lambda = sol.mu;
            cp.uprime0 = sol.uprime0;
            cp.terminal = Terminal::DirichletRoot;
            cp.newton = sol.report;
            if (gap_pending && !accepted.empty()) forced_breaks.push_back(accepted.size());
            accepted.push_back(std::move(cp));
            gap_pending = false;
            sweep.points.push_back(std::move(sol));
        } else {
            CurvePoint cp;
            cp.alpha = xi;
            cp.lambda = sol.mu;
            cp.terminal = Terminal::NewtonFailed;
            cp.newton = sol.report;
            meta.rejected.push_back(std::move(cp));
            meta.warnings.push_back("xi = " + std::to_string(xi) + ": " + sol.report.failure);
            gap_pending = true;
        }
    }

    sweep.curve = split_branches_adaptive(std::move(accepted), forced_breaks);
    sweep.curve.problem.family = Family::HarmonicForced;
    sweep.curve.problem.f = f;
    sweep.curve.problem.k = k;
    sweep.curve.meta = std::move(meta);
    return sweep;
}

struct MuRoot {
    double xi = 0.0;
    HarmonicSolution solution;
};

/// Finds the zeros of mu(xi) bracketed by the sweep and refines them by a
/// bracket-preserving secant, each evaluation being a warm-started Newton
/// solve. Returns the solutions of the unforced problem with their u'(0).
inline std::vector<MuRoot> find_mu_roots(const XiSweep& sweep, const Nonlinearity& f,
                                         std::function<double(double)> e, int k,
                                         const HarmonicOptions& opts = {}) {
    if (!e) e = detail::zero_forcing();
    std::vector<MuRoot> roots;

    auto solve_at = [&](double xi, const LinearCombo& warm) {
        LinearCombo c = warm;
        return detail::newton_at_xi(
            f, e, k, xi, [c](double x) { return c.eval(x); }, opts);
    };

    for (std::size_t i = 0; i + 1 < sweep.points.size(); ++i) {
        const auto& pa = sweep.points[i];
        const auto& pb = sweep.points[i + 1];
        if (pa.mu == 0.0) {
            roots.push_back({pa.xi, pa});
            continue;
        }
        if ((pa.mu > 0.0) == (pb.mu > 0.0)) continue;

        double xa = pa.xi, xb = pb.xi, fa = pa.mu, fb = pb.mu;
        HarmonicSolution best = std::abs(fa) < std::abs(fb) ? pa : pb;
        LinearCombo warm = best.combo;
        for (int it = 0; it < 80 && std::abs(best.mu) > opts.mu_root_tol; ++it) {
            double xm = xb - fb * (xb - xa) / (fb - fa);
            if (!(xm > std::min(xa, xb) && xm < std::max(xa, xb))) xm = 0.5 * (xa + xb);
            HarmonicSolution sm = solve_at(xm, warm);
            if (!sm.report.converged) break;
            warm = sm.combo;
            if (std::abs(sm.mu) < std::abs(best.mu)) best = sm;
            if ((sm.mu > 0.0) == (fa > 0.0)) {
                xa = xm;
                fa = sm.mu;
            } else {
                xb = xm;
                fb = sm.mu;
                fa *= 0.5;  // Illinois
            }
        }
        if (std::abs(best.mu) <= opts.mu_root_tol) roots.push_back({best.xi, best});
    }

    // trailing exact zero
    if (!sweep.points.empty() && sweep.points.back().mu == 0.0)
        roots.push_back({sweep.points.back().xi, sweep.points.back()});
    return roots;
}

}  // namespace solcurve::harmonic

#endif  // SOLCURVE_HARMONIC_HPP
