#ifndef SOLCURVE_CURVE_HPP
#define SOLCURVE_CURVE_HPP

/// \file curve.hpp
/// Branch splitting and fold detection on computed point sequences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <vector>

#include "solcurve/problem.hpp"

namespace solcurve {

namespace detail {

/// Terminal kinds that should never share a branch.
inline bool same_terminal_class(Terminal a, Terminal b) { return a == b; }

inline std::vector<BranchRange> ranges_from_breaks(std::size_t n,
                                                   const std::vector<std::size_t>& breaks) {
    std::vector<BranchRange> out;
    std::size_t begin = 0;
    for (std::size_t b : breaks) {
        out.push_back({begin, b});
        begin = b;
    }
    if (begin < n || n == 0) {
        if (n > 0) out.push_back({begin, n});
    }
    return out;
}

}  // namespace detail

/// Splits an alpha-ordered point list into branches with a fixed jump
/// threshold: a new branch starts whenever |lambda_{i+1} - lambda_i| > jump
/// or the terminal kind changes. Empty input yields an empty curve.
inline SolutionCurve split_branches(std::vector<CurvePoint> points, double jump) {
    SolutionCurve curve;
    curve.points = std::move(points);
    if (curve.points.empty()) return curve;
    std::vector<std::size_t> breaks;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& prev = curve.points[i - 1];
        const auto& cur = curve.points[i];
        if (std::abs(cur.lambda - prev.lambda) > jump ||
            !detail::same_terminal_class(cur.terminal, prev.terminal))
            breaks.push_back(i);
    }
    curve.branches = detail::ranges_from_breaks(curve.points.size(), breaks);
    return curve;
}

/// Scale-free splitting: the threshold at each step is
/// max(1e-3, 0.5 * (max - min of lambda over a trailing window of 10
/// points)). Jump splitting is suppressed until the window holds 3 points.
/// `extra_breaks` lets sweep assembly force boundaries where grid points
/// were skipped or rejected.
inline SolutionCurve split_branches_adaptive(std::vector<CurvePoint> points,
                                             const std::vector<std::size_t>& extra_breaks = {}) {
    SolutionCurve curve;
    curve.points = std::move(points);
    if (curve.points.empty()) return curve;

    auto forced = [&extra_breaks](std::size_t i) {
        return std::find(extra_breaks.begin(), extra_breaks.end(), i) != extra_breaks.end();
    };

    std::vector<std::size_t> breaks;
    std::deque<double> window{curve.points.front().lambda};
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& prev = curve.points[i - 1];
        const auto& cur = curve.points[i];
        auto [lo, hi] = std::minmax_element(window.begin(), window.end());
        double threshold = std::max(1e-3, 0.5 * (*hi - *lo));
        // with fewer than 4 trailing points the window range is not yet a
        // usable scale (a uniform slope would sit exactly on the threshold)
        bool jumped = window.size() >= 4 && std::abs(cur.lambda - prev.lambda) > threshold;
        if (jumped || forced(i) || !detail::same_terminal_class(cur.terminal, prev.terminal)) {
            breaks.push_back(i);
            window.clear();
        }
        window.push_back(cur.lambda);
        if (window.size() > 10) window.pop_front();
    }
    curve.branches = detail::ranges_from_breaks(curve.points.size(), breaks);
    return curve;
}

struct Fold {
    std::size_t index;  // interior point where d(lambda) changes sign
    double alpha;       // refined by a 3-point parabolic fit
    double lambda;
};

/// Finds turning points: indices where the lambda increment changes sign
/// within a branch. Increments below 1e-8 * max(1, |lambda|) are treated as
/// zero so that flat curves report no folds. Branches with fewer than three
/// points are skipped.
inline std::vector<Fold> detect_folds(const SolutionCurve& curve) {
    std::vector<Fold> folds;
    for (const auto& br : curve.branches) {
        if (br.size() < 3) continue;
        int last_sign = 0;
        for (std::size_t i = br.begin + 1; i < br.end; ++i) {
            double d = curve.points[i].lambda - curve.points[i - 1].lambda;
            double dead = 1e-8 * std::max(1.0, std::abs(curve.points[i].lambda));
            int sign = std::abs(d) <= dead ? 0 : (d > 0 ? 1 : -1);
            if (sign == 0) continue;
            if (last_sign != 0 && sign != last_sign) {
                std::size_t j = i - 1;  // vertex candidate
                std::size_t lo = j > br.begin ? j - 1 : j;
                std::size_t hi = std::min(j + 1, br.end - 1);
                const auto& p0 = curve.points[lo];
                const auto& p1 = curve.points[j];
                const auto& p2 = curve.points[hi];
                // 3-point parabolic fit in (alpha, lambda); fall back to the
                // grid point when the fit degenerates.
                double d01 = p1.alpha - p0.alpha, d21 = p1.alpha - p2.alpha;
                double num = d01 * d01 * (p1.lambda - p2.lambda) -
                             d21 * d21 * (p1.lambda - p0.lambda);
                double den = d01 * (p1.lambda - p2.lambda) - d21 * (p1.lambda - p0.lambda);
                double a_star = p1.alpha, l_star = p1.lambda;
                if (std::abs(den) > 1e-300) {
                    a_star = p1.alpha - 0.5 * num / den;
                    // evaluate the interpolating parabola at a_star
                    double x0 = p0.alpha, x1 = p1.alpha, x2 = p2.alpha;
                    auto L = [&](double xi, double xj, double xk, double x) {
                        return (x - xj) * (x - xk) / ((xi - xj) * (xi - xk));
                    };
                    l_star = p0.lambda * L(x0, x1, x2, a_star) + p1.lambda * L(x1, x0, x2, a_star) +
                             p2.lambda * L(x2, x0, x1, a_star);
                }
                folds.push_back({j, a_star, l_star});
            }
            last_sign = sign;
        }
    }
    return folds;
}

}  // namespace solcurve

#endif  // SOLCURVE_CURVE_HPP
