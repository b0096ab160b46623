#ifndef SOLCURVE_SVG_HPP
#define SOLCURVE_SVG_HPP

/// \file svg.hpp
/// Self-contained SVG rendering of a solution curve: one polyline per
/// branch, labeled axes, no external assets. The data-to-plot mapping is
/// written into a leading comment so the output can be parsed back and
/// checked against the CSV.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "solcurve/problem.hpp"

namespace solcurve::svg {

struct Layout {
    double width = 800, height = 600;
    double margin_left = 70, margin_right = 25, margin_top = 25, margin_bottom = 50;
};

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline void write_curve(std::ostream& os, const SolutionCurve& curve, const Layout& lay = {}) {
    // data extent: x = lambda (mu), y = alpha (xi)
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!curve.points.empty()) {
        xmin = xmax = curve.points.front().lambda;
        ymin = ymax = curve.points.front().alpha;
        for (const auto& p : curve.points) {
            xmin = std::min(xmin, p.lambda);
            xmax = std::max(xmax, p.lambda);
            ymin = std::min(ymin, p.alpha);
            ymax = std::max(ymax, p.alpha);
        }
    }
    auto pad = [](double& lo, double& hi) {
        double d = hi - lo;
        if (d <= 0.0) d = std::max(1.0, std::abs(hi));
        lo -= 0.05 * d;
        hi += 0.05 * d;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);

    double x0 = lay.margin_left, y0 = lay.margin_top;
    double w = lay.width - lay.margin_left - lay.margin_right;
    double h = lay.height - lay.margin_top - lay.margin_bottom;
    auto sx = [&](double x) { return x0 + w * (x - xmin) / (xmax - xmin); };
    auto sy = [&](double y) { return y0 + h * (ymax - y) / (ymax - ymin); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << lay.width << "\" height=\""
       << lay.height << "\">\n";
    os << "<!-- viewport " << fmt(xmin) << ' ' << fmt(xmax) << ' ' << fmt(ymin) << ' '
       << fmt(ymax) << " plot " << fmt(x0) << ' ' << fmt(y0) << ' ' << fmt(w) << ' ' << fmt(h)
       << " -->\n";
    os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(w)
       << "\" height=\"" << fmt(h) << "\" fill=\"white\" stroke=\"black\"/>\n";

    // ticks and labels
    for (int i = 0; i <= 5; ++i) {
        double fx = xmin + (xmax - xmin) * i / 5.0;
        double px = sx(fx);
        os << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(y0 + h) << "\" x2=\"" << fmt(px)
           << "\" y2=\"" << fmt(y0 + h + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(y0 + h + 18)
           << "\" font-size=\"11\" text-anchor=\"middle\">";
        char lbl[32];
        std::snprintf(lbl, sizeof lbl, "%.6g", fx);
        os << lbl << "</text>\n";

        double fy = ymin + (ymax - ymin) * i / 5.0;
        double py = sy(fy);
        os << "<line x1=\"" << fmt(x0 - 5) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(x0)
           << "\" y2=\"" << fmt(py) << "\" stroke=\"black\"/>\n";
        std::snprintf(lbl, sizeof lbl, "%.6g", fy);
        os << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(py + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">" << lbl << "</text>\n";
    }
    bool harmonic = curve.problem.family == Family::HarmonicForced;
    os << "<text x=\"" << fmt(x0 + w / 2) << "\" y=\"" << fmt(lay.height - 10)
       << "\" font-size=\"13\" text-anchor=\"middle\">" << (harmonic ? "mu" : "lambda")
       << "</text>\n";
    os << "<text x=\"15\" y=\"" << fmt(y0 + h / 2) << "\" font-size=\"13\" text-anchor=\"middle\""
       << " transform=\"rotate(-90 15 " << fmt(y0 + h / 2) << ")\">"
       << (harmonic ? "xi" : "u(0)") << "</text>\n";

    for (const auto& br : curve.branches) {
        os << "<polyline class=\"branch\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\""
           << " points=\"";
        for (std::size_t i = br.begin; i < br.end; ++i) {
            if (i != br.begin) os << ' ';
            os << fmt(sx(curve.points[i].lambda)) << ',' << fmt(sy(curve.points[i].alpha));
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

}  // namespace solcurve::svg

#endif  // SOLCURVE_SVG_HPP
