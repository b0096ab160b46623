#ifndef SOLCURVE_RUNNER_HPP
#define SOLCURVE_RUNNER_HPP

/// \file runner.hpp
/// Executes a RunConfig: dispatches to the family solver, writes the curve
/// CSV (and optional SVG), and computes solution profiles at a requested
/// parameter value. Exit codes: 0 success, 1 config error, 2 first-point
/// solve failure (partial results are still written, with a status
/// footer), 3 profile-point failure.

#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "solcurve/beam.hpp"
#include "solcurve/config.hpp"
#include "solcurve/csv.hpp"
#include "solcurve/harmonic.hpp"
#include "solcurve/nonauto.hpp"
#include "solcurve/plaplace.hpp"
#include "solcurve/shootscale.hpp"
#include "solcurve/svg.hpp"

namespace solcurve::runner {

inline ShootOptions shoot_options(const config::RunConfig& cfg) {
    ShootOptions o;
    o.eps = cfg.eps;
    o.tend = cfg.tend;
    o.tol = cfg.tol;
    o.event_tol = cfg.event_tol;
    o.supercritical = cfg.supercritical;
    o.negative_floor = cfg.negative_floor;
    o.jobs = cfg.jobs;
    return o;
}

inline PlaplaceOptions plaplace_options(const config::RunConfig& cfg) {
    PlaplaceOptions o;
    o.mode = cfg.plaplace_mode;
    o.h_z = cfg.h_z;
    o.h_r = cfg.h_r;
    o.tend = cfg.tend;
    o.tol = cfg.tol;
    o.event_tol = cfg.event_tol;
    o.jobs = cfg.jobs;
    return o;
}

inline nonauto::NewtonOptions nonauto_options(const config::RunConfig& cfg) {
    nonauto::NewtonOptions o;
    o.tol = cfg.newton_tol;
    o.eps = cfg.eps;
    o.tol_ode = cfg.tol;
    return o;
}

inline beam::BeamOptions beam_options(const config::RunConfig& cfg) {
    beam::BeamOptions o;
    o.tol = cfg.newton_tol;
    o.tol_ode = cfg.tol;
    return o;
}

inline harmonic::HarmonicOptions harmonic_options(const config::RunConfig& cfg) {
    harmonic::HarmonicOptions o;
    o.tol_ode = cfg.tol;
    o.warm = cfg.warm_start;
    return o;
}

inline std::function<double(double)> forcing_of(const config::RunConfig& cfg) {
    if (!cfg.problem.forcing) return {};
    Nonlinearity e = *cfg.problem.forcing;
    return [e](double x) { return e.value(x, 0.0); };
}

/// Solves the configured sweep. Throws FirstPointError / ConfigError /
/// invalid_argument on the corresponding failures.
inline SolutionCurve solve_curve(const config::RunConfig& cfg) {
    const ProblemSpec& pr = cfg.problem;
    switch (pr.family) {
        case Family::RadialDirichlet:
            return dirichlet_curve(pr, cfg.grid_start, cfg.grid_step, cfg.grid_count,
                                   shoot_options(cfg));
        case Family::RadialNeumann:
            return neumann_curve(pr, cfg.grid_start, cfg.grid_step, cfg.grid_count,
                                 shoot_options(cfg));
        case Family::PLaplaceDirichlet:
            return plaplace_curve(pr, cfg.grid_start, cfg.grid_step, cfg.grid_count,
                                  plaplace_options(cfg));
        case Family::NonAutonomousRadial: {
            nonauto::ContinuationOptions o;
            o.newton = nonauto_options(cfg);
            o.lambda_init = cfg.seed_lambda;
            return nonauto::continue_in_alpha(pr, cfg.grid_start, cfg.grid_step, cfg.grid_count,
                                              o);
        }
        case Family::ClampedBeam: {
            beam::BeamCurveOptions o;
            o.newton = beam_options(cfg);
            if (cfg.seed_lambda && cfg.seed_beta)
                o.start = std::make_pair(*cfg.seed_lambda, *cfg.seed_beta);
            return beam::beam_curve(cfg.grid_start, cfg.grid_step, cfg.grid_count, pr.f, o);
        }
        case Family::HarmonicForced: {
            harmonic::XiSweep sweep =
                harmonic::continue_in_xi(pr.f, forcing_of(cfg), pr.k, cfg.grid_start,
                                         cfg.grid_step, cfg.grid_count, harmonic_options(cfg));
            SolutionCurve curve = std::move(sweep.curve);
            curve.problem = pr;
            return curve;
        }
    }
    throw std::logic_error("unreachable family");
}

struct RunOutcome {
    int exit_code = 0;
    std::string status = "ok";
    SolutionCurve curve;
};

inline void write_outputs(const config::RunConfig& cfg, const SolutionCurve& curve,
                          const std::string& status) {
    if (!cfg.csv_path.empty()) {
        std::ofstream os(cfg.csv_path);
        if (!os) throw config::ConfigError("cannot write CSV to '" + cfg.csv_path + "'");
        csv::write_curve(os, curve, status);
    }
    if (!cfg.svg_path.empty()) {
        std::ofstream os(cfg.svg_path);
        if (!os) throw config::ConfigError("cannot write SVG to '" + cfg.svg_path + "'");
        svg::write_curve(os, curve);
    }
}

inline RunOutcome run(const config::RunConfig& cfg) {
    RunOutcome out;
    try {
        out.curve = solve_curve(cfg);
    } catch (const FirstPointError& ex) {
        out.exit_code = 2;
        out.status = ex.what();
        out.curve.problem = cfg.problem;
        write_outputs(cfg, out.curve, out.status);
        return out;
    }
    if (out.curve.points.empty()) {
        out.exit_code = 2;
        out.status = "no accepted points";
    }
    write_outputs(cfg, out.curve, out.status);
    return out;
}

struct ProfileOutcome {
    int exit_code = 0;
    std::string status = "ok";
    std::string abscissa = "r";
    std::vector<std::pair<double, double>> rows;  // 401 equispaced points
};

namespace detail {

constexpr int profile_points = 401;

inline std::vector<std::pair<double, double>> sample(
    double length, const std::function<double(double)>& value) {
    std::vector<std::pair<double, double>> rows;
    rows.reserve(profile_points);
    for (int i = 0; i < profile_points; ++i) {
        double x = length * i / static_cast<double>(profile_points - 1);
        rows.emplace_back(x, value(x));
    }
    return rows;
}

}  // namespace detail

/// Computes the dense solution profile at alpha (or xi) = `at`. Newton
/// families run the configured sweep up to the nearest grid point for a
/// warm start, then solve at the exact value.
inline ProfileOutcome profile_at(const config::RunConfig& cfg, double at) {
    ProfileOutcome out;
    const ProblemSpec& pr = cfg.problem;
    switch (pr.family) {
        case Family::RadialDirichlet:
        case Family::RadialNeumann: {
            ShootResult sr = shoot(pr, at, shoot_options(cfg));
            bool ok = pr.family == Family::RadialDirichlet ? sr.kind == ShootKind::VRoot
                                                           : sr.kind == ShootKind::VPrimeRoot;
            if (!ok || sr.degenerate) {
                out.exit_code = 3;
                out.status = "shoot at alpha = " + std::to_string(at) +
                             " did not end in the required event";
                return out;
            }
            double root = sr.r_star;
            const auto& traj = sr.trajectory;
            double eps = traj.t_begin();
            out.rows = detail::sample(1.0, [&](double r) {
                double s = root * r;
                return s < eps ? at : traj.evaluate(s, 0);
            });
            return out;
        }
        case Family::PLaplaceDirichlet: {
            PlaplaceOptions po = plaplace_options(cfg);
            ShootResult sr = plaplace_shoot(pr, at, po);
            if (sr.kind != ShootKind::VRoot) {
                out.exit_code = 3;
                out.status = "p-Laplace shoot found no root at alpha = " + std::to_string(at);
                return out;
            }
            const auto& traj = sr.trajectory;
            double start = traj.t_begin();
            double xi_root = std::pow(sr.lambda, 1.0 / pr.p);
            double beta_bar = pr.p / (2.0 * (pr.p - 1.0));
            bool regularized = po.mode == PlaplaceMode::Regularized;
            out.rows = detail::sample(1.0, [&](double r) {
                double s = regularized ? std::pow(xi_root * r, beta_bar) : xi_root * r;
                return s < start ? at : traj.evaluate(s, 0);
            });
            return out;
        }
        case Family::NonAutonomousRadial: {
            nonauto::NewtonOptions no = nonauto_options(cfg);
            double warm;
            if (cfg.seed_lambda) {
                warm = *cfg.seed_lambda;
            } else {
                // sweep toward `at` for a warm start
                int steps = std::max(
                    1, std::min(cfg.grid_count,
                                static_cast<int>(std::floor((at - cfg.grid_start) /
                                                            cfg.grid_step + 1e-9))));
                nonauto::ContinuationOptions co;
                co.newton = no;
                SolutionCurve c =
                    nonauto::continue_in_alpha(pr, cfg.grid_start, cfg.grid_step, steps, co);
                if (c.points.empty()) {
                    out.exit_code = 3;
                    out.status = "warm-start sweep produced no points";
                    return out;
                }
                warm = c.points.back().lambda;
            }
            nonauto::NewtonResult nr = nonauto::newton_lambda(pr, at, warm, no);
            if (!nr.report.converged) {
                out.exit_code = 3;
                out.status = "Newton failed at alpha = " + std::to_string(at) + ": " +
                             nr.report.failure;
                return out;
            }
            const auto& traj = nr.u;
            double eps = traj.t_begin();
            out.rows = detail::sample(1.0, [&](double r) {
                return r < eps ? at : traj.evaluate(r, 0);
            });
            return out;
        }
        case Family::ClampedBeam: {
            beam::BeamOptions bo = beam_options(cfg);
            double lw, bw;
            if (cfg.seed_lambda && cfg.seed_beta) {
                lw = *cfg.seed_lambda;
                bw = *cfg.seed_beta;
            } else {
                int steps = std::max(
                    1, std::min(cfg.grid_count,
                                static_cast<int>(std::floor((at - cfg.grid_start) /
                                                            cfg.grid_step + 1e-9))));
                beam::BeamCurveOptions co;
                co.newton = bo;
                SolutionCurve c = beam::beam_curve(cfg.grid_start, cfg.grid_step, steps, pr.f, co);
                if (c.points.empty()) {
                    out.exit_code = 3;
                    out.status = "warm-start sweep produced no points";
                    return out;
                }
                lw = c.points.back().lambda;
                bw = c.points.back().beta.value_or(-4.0 * at);
            }
            beam::BeamState st = beam::beam_newton(at, lw, bw, pr.f, bo);
            if (!st.report.converged) {
                out.exit_code = 3;
                out.status = "Newton failed at alpha = " + std::to_string(at) + ": " +
                             st.report.failure;
                return out;
            }
            out.abscissa = "x";
            const auto& traj = st.u;
            out.rows = detail::sample(1.0, [&](double x) { return traj.evaluate(x, 0); });
            return out;
        }
        case Family::HarmonicForced: {
            harmonic::HarmonicOptions ho = harmonic_options(cfg);
            auto e = forcing_of(cfg);
            if (!e) e = [](double) { return 0.0; };
            std::function<double(double)> u0;
            int steps = std::max(
                1, std::min(cfg.grid_count,
                            static_cast<int>(std::floor((at - cfg.grid_start) / cfg.grid_step +
                                                        1e-9))));
            harmonic::XiSweep sweep = harmonic::continue_in_xi(pr.f, e, pr.k, cfg.grid_start,
                                                               cfg.grid_step, steps, ho);
            if (!sweep.points.empty()) {
                harmonic::LinearCombo warm = sweep.points.back().combo;
                u0 = [warm](double x) { return warm.eval(x); };
            } else {
                int k = pr.k;
                u0 = [at, k](double x) { return at * std::sin(k * x); };
            }
            harmonic::HarmonicSolution sol =
                harmonic::detail::newton_at_xi(pr.f, e, pr.k, at, u0, ho);
            if (!sol.report.converged) {
                out.exit_code = 3;
                out.status = "Newton failed at xi = " + std::to_string(at) + ": " +
                             sol.report.failure;
                return out;
            }
            out.abscissa = "x";
            harmonic::LinearCombo combo = sol.combo;
            out.rows = detail::sample(harmonic::pi, [combo](double x) { return combo.eval(x); });
            return out;
        }
    }
    out.exit_code = 1;
    out.status = "unknown family";
    return out;
}

inline int profile_to_file(const config::RunConfig& cfg, double at, const std::string& path) {
    ProfileOutcome out = profile_at(cfg, at);
    std::ofstream os(path);
    if (!os) throw config::ConfigError("cannot write profile to '" + path + "'");
    csv::write_profile(os, out.abscissa, out.rows, out.status);
    return out.exit_code;
}

}  // namespace solcurve::runner

#endif  // SOLCURVE_RUNNER_HPP
