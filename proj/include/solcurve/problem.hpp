#ifndef SOLCURVE_PROBLEM_HPP
#define SOLCURVE_PROBLEM_HPP

/// \file problem.hpp
/// Problem families and the curve data types shared by all solvers.
/// Everything here is immutable after construction and safe to read
/// concurrently.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "solcurve/nonlinearity.hpp"

namespace solcurve {

enum class Family {
    RadialDirichlet,
    RadialNeumann,
    PLaplaceDirichlet,
    NonAutonomousRadial,
    ClampedBeam,
    HarmonicForced
};

inline std::string family_name(Family f) {
    switch (f) {
        case Family::RadialDirichlet: return "radial_dirichlet";
        case Family::RadialNeumann: return "radial_neumann";
        case Family::PLaplaceDirichlet: return "plaplace_dirichlet";
        case Family::NonAutonomousRadial: return "nonauto_radial";
        case Family::ClampedBeam: return "clamped_beam";
        case Family::HarmonicForced: return "harmonic_forced";
    }
    return "?";
}

struct ProblemSpec {
    Family family = Family::RadialDirichlet;
    int n = 1;                      // space dimension (radial families)
    double p = 2.0;                 // p-Laplace exponent
    std::optional<double> q;        // supercritical exponent, reporting only
    Nonlinearity f;
    std::optional<Nonlinearity> forcing;  // e(x), harmonic family only
    int k = 1;                      // harmonic index, 1 or 2

    void validate() const {
        if (!f.valid()) throw std::invalid_argument("problem: nonlinearity not set");
        switch (family) {
            case Family::RadialDirichlet:
            case Family::RadialNeumann:
                if (n < 1) throw std::invalid_argument("problem: n must be >= 1");
                if (f.nonautonomous)
                    throw std::invalid_argument(
                        "problem: shoot-and-scale requires an autonomous f(u)");
                break;
            case Family::PLaplaceDirichlet:
                if (n < 1) throw std::invalid_argument("problem: n must be >= 1");
                if (p <= 1.0) throw std::invalid_argument("problem: p must be > 1");
                if (f.nonautonomous)
                    throw std::invalid_argument(
                        "problem: shoot-and-scale requires an autonomous f(u)");
                break;
            case Family::NonAutonomousRadial:
                if (n < 1) throw std::invalid_argument("problem: n must be >= 1");
                if (!f.fu) throw std::invalid_argument("problem: Newton needs f_u");
                break;
            case Family::ClampedBeam:
                if (!f.fu) throw std::invalid_argument("problem: Newton needs f_u");
                break;
            case Family::HarmonicForced:
                if (k != 1 && k != 2) throw std::invalid_argument("problem: k must be 1 or 2");
                if (!f.fu) throw std::invalid_argument("problem: Newton needs f_u");
                break;
        }
    }
};

/// Thrown by the Newton continuation sweeps when the very first grid point
/// fails; later failures are recorded per point and the sweep continues.
class FirstPointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// How the computation of one curve point ended.
enum class Terminal { DirichletRoot, NeumannCritical, NoEventByTend, WentNegative, NewtonFailed };

inline std::string terminal_name(Terminal t) {
    switch (t) {
        case Terminal::DirichletRoot: return "dirichlet_root";
        case Terminal::NeumannCritical: return "neumann_critical";
        case Terminal::NoEventByTend: return "no_event";
        case Terminal::WentNegative: return "went_negative";
        case Terminal::NewtonFailed: return "newton_failed";
    }
    return "?";
}

/// Per-point iteration history of a Newton solve.
struct NewtonReport {
    std::vector<std::pair<double, double>> iterates;  // (lambda, residual norm)
    bool converged = false;
    int steps = 0;
    std::string failure;  // empty when converged
};

/// One point of a solution curve. alpha is u(0) for families 1-5 and the
/// harmonic xi for the forced problem; lambda doubles as mu there.
struct CurvePoint {
    double alpha = 0.0;
    double lambda = 0.0;
    std::optional<double> beta;      // u''(0), beam family
    std::optional<double> uprime0;   // u'(0), harmonic family
    Terminal terminal = Terminal::DirichletRoot;
    std::optional<NewtonReport> newton;
};

/// Half-open index range [begin, end) into SolutionCurve::points.
struct BranchRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

struct CurveMeta {
    double grid_start = 0.0;
    double grid_step = 0.0;
    int grid_count = 0;
    double tol_rel = 0.0, tol_abs = 0.0, event_tol = 0.0;
    double eps_start = 0.0, tend = 0.0;
    std::vector<std::string> warnings;
    std::vector<CurvePoint> rejected;  // grid points that did not make the curve
};

/// An ordered, branch-segmented sequence of curve points. Within a branch
/// points are sorted by alpha and consecutive lambda jumps stay below the
/// splitting threshold used at assembly.
struct SolutionCurve {
    std::vector<CurvePoint> points;
    std::vector<BranchRange> branches;
    ProblemSpec problem;
    CurveMeta meta;

    bool empty() const { return points.empty(); }
};

}  // namespace solcurve

#endif  // SOLCURVE_PROBLEM_HPP
