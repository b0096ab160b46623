#ifndef SOLCURVE_SHOOTSCALE_HPP
#define SOLCURVE_SHOOTSCALE_HPP

/// \file shootscale.hpp
/// Shoot-and-scale curves for autonomous radial Dirichlet and Neumann
/// problems. For each u(0) = alpha the unit-parameter problem
///   v'' + ((n-1)/r) v' + f(v) = 0,  v(0) = alpha, v'(0) = 0
/// is integrated from r = eps with a second-order series start; lambda is
/// the square of the first root of v (Dirichlet) or of v' (Neumann).
/// The supercritical mode instead terminates only once v has crossed a
/// small negative floor, so ground-state trajectories that never cross
/// zero are not mistaken for solutions.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "solcurve/curve.hpp"
#include "solcurve/ode.hpp"
#include "solcurve/parallel.hpp"
#include "solcurve/problem.hpp"

namespace solcurve {

struct ShootOptions {
    double eps = 1e-8;           // series start abscissa
    double tend = 1000.0;        // integration cap, "never achieved"
    ode::Tolerances tol{};       // rel 1e-10, abs 1e-12
    double event_tol = 1e-12;
    bool supercritical = false;  // terminate on v < -negative_floor only
    double negative_floor = 1e-8;
    int jobs = 1;                // worker pool size for sweeps
};

enum class ShootKind { VRoot, VPrimeRoot, NoEvent, WentNegative };

struct ShootResult {
    double alpha = 0.0;
    double r_star = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    ShootKind kind = ShootKind::NoEvent;
    bool degenerate = false;  // v'-root with |v''| <= 1e-10 (equilibrium)
    std::string note;
    ode::DenseTrajectory trajectory;
};

namespace detail {

inline ode::IvpSystem radial_system(const Nonlinearity& f, int n, double alpha, double eps,
                                    double tend) {
    ode::IvpSystem sys;
    sys.dim = 2;
    double nm1 = static_cast<double>(n - 1);
    sys.rhs = [f, nm1](double r, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -nm1 / r * y[1] - f.value(y[0]);
    };
    sys.t0 = eps;
    sys.t_end = tend;
    double fa = f.value(alpha);
    double nd = static_cast<double>(n);
    sys.y0 = {alpha - fa / (2.0 * nd) * eps * eps, -fa / nd * eps};
    return sys;
}

}  // namespace detail

/// One shot of the unit-parameter problem. In the normal mode the first
/// root of v (decreasing) or of v' (either direction, armed from eps)
/// stops the integration; whichever came first is reported with
/// lambda = r*^2. In supercritical mode the only event is the crossing of
/// v below -negative_floor; the zero of v just before it is recovered from
/// the dense output and reported as WentNegative.
inline ShootResult shoot(const ProblemSpec& problem, double alpha, const ShootOptions& opts = {}) {
    if (!(alpha > 0.0)) throw std::invalid_argument("shoot: alpha must be positive");

    ShootResult res;
    res.alpha = alpha;

    ode::IvpSystem sys =
        detail::radial_system(problem.f, problem.n, alpha, opts.eps, opts.tend);
    if (opts.supercritical) {
        double floor = opts.negative_floor;
        sys.events.push_back({[floor](double, std::span<const double> y) { return y[0] + floor; },
                              ode::EventDirection::Decreasing, opts.eps});
    } else {
        sys.events.push_back({[](double, std::span<const double> y) { return y[0]; },
                              ode::EventDirection::Decreasing, opts.eps});
        sys.events.push_back({[](double, std::span<const double> y) { return y[1]; },
                              ode::EventDirection::Any, opts.eps});
    }

    res.trajectory = ode::integrate(sys, opts.tol, opts.event_tol);
    const auto& traj = res.trajectory;

    switch (traj.status) {
        case ode::IntegrationStatus::ReachedEnd:
            res.kind = ShootKind::NoEvent;
            res.note = "no event by tend (possible ground state)";
            return res;
        case ode::IntegrationStatus::NonFiniteRhs:
        case ode::IntegrationStatus::StepUnderflow:
            res.kind = ShootKind::NoEvent;
            res.note = traj.error;
            return res;
        case ode::IntegrationStatus::EventTriggered: break;
    }

    const auto& ev = *traj.first_event;
    if (opts.supercritical) {
        res.kind = ShootKind::WentNegative;
        // v has just crossed the floor; the genuine zero sits slightly
        // earlier inside the covered range
        double lo = std::max(traj.t_begin(), ev.t - 1.0);
        auto root = ode::dense_root(traj, 0, lo, ev.t);
        for (double back = 2.0; !root && lo > traj.t_begin(); back *= 2.0) {
            lo = std::max(traj.t_begin(), ev.t - back);
            root = ode::dense_root(traj, 0, lo, ev.t);
        }
        res.r_star = root.value_or(ev.t);
        res.lambda = res.r_star * res.r_star;
        return res;
    }

    res.r_star = ev.t;
    res.lambda = ev.t * ev.t;
    if (ev.index == 0) {
        res.kind = ShootKind::VRoot;
    } else {
        res.kind = ShootKind::VPrimeRoot;
        // at a v'-root, v'' = -f(v); exclude equilibria
        double vdd = -problem.f.value(ev.y[0]);
        if (std::abs(vdd) <= 1e-10) {
            res.degenerate = true;
            res.note = "degenerate v' root (equilibrium)";
        }
    }
    return res;
}

namespace detail {

struct SweepPoint {
    double alpha;
    ShootKind kind;
    double r_star, lambda;
    double v_at = std::numeric_limits<double>::quiet_NaN();  // v(r*)
    bool degenerate;
    bool skipped = false;
    std::string note;
};

/// Runs the grid alpha_i = alpha0 + i * d_alpha, i = 1..nsteps, keeps the
/// points whose kind matches `keep`, records everything else in metadata,
/// and splits branches (a skipped or rejected grid point also forces a
/// branch boundary).
inline SolutionCurve sweep(const ProblemSpec& problem, double alpha0, double d_alpha, int nsteps,
                           const ShootOptions& opts, ShootKind keep, Terminal keep_terminal,
                           bool skip_equilibria) {
    if (!(d_alpha > 0.0)) throw std::invalid_argument("sweep: d_alpha must be positive");
    if (nsteps < 1) throw std::invalid_argument("sweep: nsteps must be >= 1");
    problem.validate();

    std::vector<SweepPoint> raw(static_cast<std::size_t>(nsteps));
    parallel_for(static_cast<std::size_t>(nsteps), opts.jobs, [&](std::size_t i) {
        double alpha = alpha0 + d_alpha * static_cast<double>(i + 1);
        SweepPoint& out = raw[i];
        out.alpha = alpha;
        if (skip_equilibria &&
            std::abs(problem.f.value(alpha)) <= 1e-14 * std::max(1.0, std::abs(alpha))) {
            out.skipped = true;
            out.kind = ShootKind::NoEvent;
            out.note = "f(alpha) = 0: constant solution, degenerate event";
            return;
        }
        ShootResult r = shoot(problem, alpha, opts);
        out.kind = r.kind;
        out.r_star = r.r_star;
        out.lambda = r.lambda;
        if (!r.trajectory.final_state().empty()) out.v_at = r.trajectory.final_state()[0];
        out.degenerate = r.degenerate;
        out.note = r.note;
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
    meta.eps_start = opts.eps;
    meta.tend = opts.tend;

    bool gap_pending = false;
    for (const auto& pt : raw) {
        auto terminal_of = [](ShootKind k) {
            switch (k) {
                case ShootKind::VRoot: return Terminal::DirichletRoot;
                case ShootKind::VPrimeRoot: return Terminal::NeumannCritical;
                case ShootKind::WentNegative: return Terminal::WentNegative;
                default: return Terminal::NoEventByTend;
            }
        };
        bool ok = !pt.skipped && pt.kind == keep && !pt.degenerate;
        if (ok && keep == ShootKind::VPrimeRoot) ok = pt.v_at > 0.0;
        if (ok) {
            CurvePoint cp;
            cp.alpha = pt.alpha;
            cp.lambda = pt.lambda;
            cp.terminal = keep_terminal;
            if (gap_pending && !accepted.empty()) forced_breaks.push_back(accepted.size());
            accepted.push_back(cp);
            gap_pending = false;
        } else {
            CurvePoint cp;
            cp.alpha = pt.alpha;
            cp.lambda = pt.lambda;
            cp.terminal = terminal_of(pt.kind);
            meta.rejected.push_back(cp);
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

}  // namespace detail

/// Dirichlet sweep: keeps the first-root points (lambda = r*^2). In the
/// supercritical mode the kept kind is WentNegative instead.
inline SolutionCurve dirichlet_curve(const ProblemSpec& problem, double alpha0, double d_alpha,
                                     int nsteps, const ShootOptions& opts = {}) {
    ShootKind keep = opts.supercritical ? ShootKind::WentNegative : ShootKind::VRoot;
    Terminal term = opts.supercritical ? Terminal::WentNegative : Terminal::DirichletRoot;
    return detail::sweep(problem, alpha0, d_alpha, nsteps, opts, keep, term, false);
}

/// Neumann sweep: keeps the first v'-root points with v > 0; grid points
/// with f(alpha) = 0 are skipped and flagged (constant solution).
inline SolutionCurve neumann_curve(const ProblemSpec& problem, double alpha0, double d_alpha,
                                   int nsteps, const ShootOptions& opts = {}) {
    return detail::sweep(problem, alpha0, d_alpha, nsteps, opts, ShootKind::VPrimeRoot,
                         Terminal::NeumannCritical, true);
}

}  // namespace solcurve

#endif  // SOLCURVE_SHOOTSCALE_HPP
