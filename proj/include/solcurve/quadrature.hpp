#ifndef SOLCURVE_QUADRATURE_HPP
#define SOLCURVE_QUADRATURE_HPP

/// \file quadrature.hpp
/// Composite 8-point Gauss-Legendre quadrature, used for the integral
/// representations and the harmonic-constraint integrals.

#include <array>
#include <cmath>
#include <cstddef>

namespace solcurve::quad {

inline constexpr std::array<double, 8> gl8_nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};

inline constexpr std::array<double, 8> gl8_weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(F&& f, double a, double b, std::size_t panels = 64) {
    double total = 0.0;
    double w = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        double lo = a + w * static_cast<double>(p);
        double mid = lo + 0.5 * w, half = 0.5 * w;
        double s = 0.0;
        for (std::size_t i = 0; i < 8; ++i) s += gl8_weights[i] * f(mid + half * gl8_nodes[i]);
        total += s * half;
    }
    return total;
}

/// Composite rule with dyadically graded panels accumulating at the left
/// endpoint, for integrands with a weak singularity there (e.g. z log z).
template <class F>
double gauss_legendre_graded(F&& f, double a, double b, std::size_t panels = 64) {
    double total = 0.0;
    double lo = a;
    for (std::size_t j = 1; j <= panels; ++j) {
        double hi = a + (b - a) * std::ldexp(1.0, static_cast<int>(j) - static_cast<int>(panels));
        total += gauss_legendre(f, lo, hi, 1);
        lo = hi;
    }
    return total;
}

}  // namespace solcurve::quad

#endif  // SOLCURVE_QUADRATURE_HPP
