#ifndef SOLCURVE_CSV_HPP
#define SOLCURVE_CSV_HPP

/// \file csv.hpp
/// Curve and profile CSV emission. Numbers are serialized with 17
/// significant digits (lossless double round-trip); branch boundaries are
/// marked by "# branch" comment lines and every file ends with a status
/// footer.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "solcurve/problem.hpp"

namespace solcurve::csv {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_curve(std::ostream& os, const SolutionCurve& curve,
                        const std::string& status = "ok") {
    Family fam = curve.problem.family;
    if (fam == Family::ClampedBeam) os << "alpha,lambda,beta\n";
    else if (fam == Family::HarmonicForced) os << "xi,mu,uprime0\n";
    else os << "alpha,lambda,terminal\n";

    for (const auto& br : curve.branches) {
        os << "# branch\n";
        for (std::size_t i = br.begin; i < br.end; ++i) {
            const CurvePoint& p = curve.points[i];
            os << format_double(p.alpha) << ',' << format_double(p.lambda) << ',';
            if (fam == Family::ClampedBeam) os << format_double(p.beta.value_or(0.0));
            else if (fam == Family::HarmonicForced) os << format_double(p.uprime0.value_or(0.0));
            else os << terminal_name(p.terminal);
            os << '\n';
        }
    }
    os << "# status: " << status << '\n';
}

inline void write_profile(std::ostream& os, const std::string& abscissa,
                          const std::vector<std::pair<double, double>>& rows,
                          const std::string& status = "ok") {
    os << abscissa << ",u\n";
    for (const auto& [x, u] : rows)
        os << format_double(x) << ',' << format_double(u) << '\n';
    os << "# status: " << status << '\n';
}

}  // namespace solcurve::csv

#endif  // SOLCURVE_CSV_HPP
