#ifndef SOLCURVE_ODE_HPP
#define SOLCURVE_ODE_HPP

/// \file ode.hpp
/// Adaptive explicit Runge-Kutta integration with dense output and event
/// detection. The stepper is the Dormand-Prince 5(4) embedded pair with the
/// free 4th-order continuous extension; events are state functionals whose
/// first root (subject to a direction filter and an arming time) stops the
/// integration.
///
/// integrate() is reentrant and keeps no state between calls; a
/// DenseTrajectory may be read concurrently once constructed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace solcurve::ode {

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;
using EventFn = std::function<double(double t, std::span<const double> y)>;

enum class EventDirection { Any, Decreasing, Increasing };

struct EventSpec {
    EventFn g;
    EventDirection direction = EventDirection::Any;
    double active_after = -std::numeric_limits<double>::infinity();
};

struct IvpSystem {
    std::size_t dim = 0;
    Rhs rhs;
    double t0 = 0.0;
    double t_end = 1.0;
    std::vector<double> y0;
    std::vector<EventSpec> events;
};

struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-12;
};

enum class IntegrationStatus { ReachedEnd, EventTriggered, NonFiniteRhs, StepUnderflow };

struct FirstEvent {
    std::size_t index = 0;  // position in IvpSystem::events
    double t = 0.0;
    std::vector<double> y;
};

/// Accepted steps with interpolation coefficients. evaluate() is continuous
/// across step boundaries and valid on [t_begin, t_last].
class DenseTrajectory {
public:
    struct Segment {
        double t, h;
        std::vector<double> r1, r2, r3, r4, r5;
    };

    double t_begin() const { return segments_.empty() ? t_final_ : segments_.front().t; }
    /// End of the covered range: the event time when one triggered,
    /// otherwise the last accepted step end.
    double t_last() const { return t_final_; }

    std::size_t dim() const { return dim_; }
    std::size_t step_count() const { return segments_.size(); }

    void evaluate(double t, std::vector<double>& y) const {
        y.assign(dim_, 0.0);
        if (segments_.empty()) {
            y = y_final_;
            return;
        }
        const Segment& s = locate(t);
        double theta = s.h != 0.0 ? (t - s.t) / s.h : 0.0;
        double th1 = 1.0 - theta;
        for (std::size_t i = 0; i < dim_; ++i)
            y[i] = s.r1[i] +
                   theta * (s.r2[i] + th1 * (s.r3[i] + theta * (s.r4[i] + th1 * s.r5[i])));
    }

    std::vector<double> evaluate(double t) const {
        std::vector<double> y;
        evaluate(t, y);
        return y;
    }

    double evaluate(double t, std::size_t component) const {
        if (segments_.empty()) return y_final_.at(component);
        const Segment& s = locate(t);
        double theta = s.h != 0.0 ? (t - s.t) / s.h : 0.0;
        double th1 = 1.0 - theta;
        return s.r1[component] +
               theta * (s.r2[component] +
                        th1 * (s.r3[component] + theta * (s.r4[component] + th1 * s.r5[component])));
    }

    const std::vector<double>& final_state() const { return y_final_; }
    double final_time() const { return t_final_; }

    IntegrationStatus status = IntegrationStatus::ReachedEnd;
    std::optional<FirstEvent> first_event;
    std::string error;  // set for NonFiniteRhs / StepUnderflow

    // assembly interface, used by integrate()
    void set_dim(std::size_t d) { dim_ = d; }
    void push_segment(Segment s) { segments_.push_back(std::move(s)); }
    void finish(double t, std::vector<double> y) {
        t_final_ = t;
        y_final_ = std::move(y);
    }

private:
    const Segment& locate(double t) const {
        // binary search for the last segment with segment.t <= t
        std::size_t lo = 0, hi = segments_.size();
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (segments_[mid].t <= t) lo = mid;
            else hi = mid;
        }
        return segments_[lo];
    }

    std::size_t dim_ = 0;
    std::vector<Segment> segments_;
    double t_final_ = 0.0;
    std::vector<double> y_final_;
};

namespace detail {

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// Bracket-preserving secant (Illinois) refinement of an event root on the
/// dense output; falls back on bisection steps when the secant stalls.
template <class Traj>
double refine_event_root(const Traj& traj, const EventFn& g, double ta, double tb, double ga,
                         double gb, double tol, std::vector<double>& scratch) {
    if (gb == 0.0) return tb;
    if (ga == 0.0) return ta;
    double fa = ga, fb = gb, a = ta, b = tb;
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        double m = b - fb * (b - a) / (fb - fa);
        if (!(m > a && m < b)) m = 0.5 * (a + b);
        traj.evaluate(m, scratch);
        double fm = g(m, scratch);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
            fa *= 0.5;  // Illinois trick against one-sided stalls
        }
    }
    return std::abs(fa) <= std::abs(fb) ? a : b;
}

struct Dopri5 {
    // Dormand-Prince 5(4) tableau
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // embedded error weights (5th minus 4th order)
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense-output weights
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;
};

}  // namespace detail

/// Integrates sys.rhs from (t0, y0) until t_end, the first armed event
/// root, or failure. The local error per step is controlled against
/// tol.rel/tol.abs by the embedded 4th-order estimate; event roots are
/// bracketed on the dense output and refined to event_tol in t.
/// NonFiniteRhs and StepUnderflow are recorded on the returned trajectory
/// together with the partial result up to the failure.
inline DenseTrajectory integrate(const IvpSystem& sys, Tolerances tol = {},
                                 double event_tol = 1e-12) {
    using D = detail::Dopri5;
    const std::size_t n = sys.dim;
    const double span = sys.t_end - sys.t0;

    // conservative control: the delivered accuracy (and with it the
    // reported event times) must sit well inside the requested band
    tol.rel *= 0.1;
    tol.abs *= 0.1;

    DenseTrajectory traj;
    traj.set_dim(n);

    std::vector<double> y = sys.y0, y1(n), ytmp(n), err(n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    double t = sys.t0;

    auto eval = [&sys](double tt, const std::vector<double>& yy, std::vector<double>& kk) {
        sys.rhs(tt, yy, kk);
        return detail::all_finite(kk);
    };

    if (!detail::all_finite(y) || !eval(t, y, k1)) {
        traj.status = IntegrationStatus::NonFiniteRhs;
        traj.error = "non-finite right-hand side at t = " + std::to_string(t);
        traj.finish(t, y);
        return traj;
    }

    // --- initial step size (Hairer-Norsett-Wanner heuristic) ---------------
    auto scaled_rms = [&](const std::vector<double>& v, const std::vector<double>& ref) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double sk = tol.abs + tol.rel * std::abs(ref[i]);
            double q = sk > 0 ? v[i] / sk : 0.0;
            s += q * q;
        }
        return std::sqrt(s / static_cast<double>(n));
    };
    double h;
    {
        double d0 = scaled_rms(y, y), d1v = scaled_rms(k1, y);
        double h0 = (d0 < 1e-5 || d1v < 1e-5) ? 1e-6 : 0.01 * d0 / d1v;
        h0 = std::min(h0, span);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h0 * k1[i];
        double d2 = 0.0;
        if (eval(t + h0, ytmp, k2)) {
            for (std::size_t i = 0; i < n; ++i) k3[i] = k2[i] - k1[i];
            d2 = scaled_rms(k3, y) / h0;
        }
        double der = std::max(d1v, d2);
        double h1 = der > 1e-15 ? std::pow(0.01 / der, 0.2) : std::max(1e-6, h0 * 1e-3);
        h = std::min({100.0 * h0, h1, span});
    }

    const double hmin = 1e-14 * std::abs(span);
    const long max_attempts = 50'000'000L;
    long attempts = 0;

    std::vector<double> yev;  // scratch for event evaluation

    while (t < sys.t_end) {
        if (++attempts > max_attempts) {
            traj.status = IntegrationStatus::StepUnderflow;
            traj.error = "step budget exhausted at t = " + std::to_string(t);
            traj.finish(t, y);
            return traj;
        }
        if (h < hmin) {
            traj.status = IntegrationStatus::StepUnderflow;
            traj.error = "step size underflow at t = " + std::to_string(t);
            traj.finish(t, y);
            return traj;
        }
        bool last = false;
        if (t + h >= sys.t_end) {
            h = sys.t_end - t;
            last = true;
        }

        // --- one Dormand-Prince attempt ------------------------------------
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * D::a21 * k1[i];
        finite = finite && eval(t + D::c2 * h, ytmp, k2);
        if (finite) {
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (D::a31 * k1[i] + D::a32 * k2[i]);
            finite = eval(t + D::c3 * h, ytmp, k3);
        }
        if (finite) {
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
            finite = eval(t + D::c4 * h, ytmp, k4);
        }
        if (finite) {
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] +
                                      D::a54 * k4[i]);
            finite = eval(t + D::c5 * h, ytmp, k5);
        }
        if (finite) {
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] +
                                      D::a64 * k4[i] + D::a65 * k5[i]);
            finite = eval(t + h, ytmp, k6);
        }
        if (finite) {
            for (std::size_t i = 0; i < n; ++i)
                y1[i] = y[i] + h * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] +
                                    D::b5 * k5[i] + D::b6 * k6[i]);
            finite = detail::all_finite(y1) && eval(t + h, y1, k7);
        }
        if (!finite) {
            // retry with a smaller step; a persistent failure ends in
            // step-size underflow or, if already minimal, a blow-up report
            if (h <= 2.0 * hmin) {
                traj.status = IntegrationStatus::NonFiniteRhs;
                traj.error = "solution blow-up near t = " + std::to_string(t);
                traj.finish(t, y);
                return traj;
            }
            h *= 0.5;
            continue;
        }

        double errnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] +
                            D::e6 * k6[i] + D::e7 * k7[i]);
            double sk = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(y1[i]));
            double q = e / sk;
            errnorm += q * q;
        }
        errnorm = std::sqrt(errnorm / static_cast<double>(n));

        if (errnorm > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(errnorm, -0.2));
            continue;
        }

        // --- accept: build the dense segment --------------------------------
        DenseTrajectory::Segment seg;
        seg.t = t;
        seg.h = h;
        seg.r1.resize(n);
        seg.r2.resize(n);
        seg.r3.resize(n);
        seg.r4.resize(n);
        seg.r5.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double dy = y1[i] - y[i];
            double bspl = h * k1[i] - dy;
            seg.r1[i] = y[i];
            seg.r2[i] = dy;
            seg.r3[i] = bspl;
            seg.r4[i] = dy - h * k7[i] - bspl;
            seg.r5[i] = h * (D::d1 * k1[i] + D::d3 * k3[i] + D::d4 * k4[i] + D::d5 * k5[i] +
                             D::d6 * k6[i] + D::d7 * k7[i]);
        }
        traj.push_segment(std::move(seg));

        // --- event scan over [t, t+h] ---------------------------------------
        double t_right = t + h;
        std::optional<FirstEvent> hit;
        for (std::size_t ev = 0; ev < sys.events.size(); ++ev) {
            const EventSpec& spec = sys.events[ev];
            double lo = std::max(t, spec.active_after);
            if (lo >= t_right) continue;

            constexpr int samples = 8;
            traj.evaluate(lo, yev);
            double ga = spec.g(lo, yev);
            double ta = lo;
            double found = std::numeric_limits<double>::quiet_NaN();
            for (int s = 1; s <= samples; ++s) {
                double tb = lo + (t_right - lo) * s / samples;
                traj.evaluate(tb, yev);
                double gb = spec.g(tb, yev);
                bool bracket = false;
                switch (spec.direction) {
                    case EventDirection::Decreasing: bracket = ga > 0.0 && gb <= 0.0; break;
                    case EventDirection::Increasing: bracket = ga < 0.0 && gb >= 0.0; break;
                    case EventDirection::Any:
                        bracket = (ga > 0.0 && gb <= 0.0) || (ga < 0.0 && gb >= 0.0);
                        break;
                }
                if (bracket) {
                    found = detail::refine_event_root(traj, spec.g, ta, tb, ga, gb, event_tol, yev);
                    break;
                }
                ta = tb;
                ga = gb;
            }
            if (std::isfinite(found) && (!hit || found < hit->t)) {
                traj.evaluate(found, yev);
                hit = FirstEvent{ev, found, yev};
            }
        }
        if (hit) {
            traj.status = IntegrationStatus::EventTriggered;
            traj.first_event = hit;
            traj.finish(hit->t, hit->y);
            return traj;
        }

        t = t_right;
        y.swap(y1);
        k1.swap(k7);  // FSAL
        if (!last) {
            double fac = errnorm > 0.0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
            h *= std::clamp(fac, 0.2, 5.0);
        }
    }

    traj.status = IntegrationStatus::ReachedEnd;
    traj.finish(sys.t_end, y);
    return traj;
}

/// Locates a root of y[component] inside an already-computed trajectory by
/// bisection on the dense output; requires a sign change on [lo, hi].
/// Used to recover the zero of v behind a supercritical floor crossing.
inline std::optional<double> dense_root(const DenseTrajectory& traj, std::size_t component,
                                        double lo, double hi, double tol = 1e-13) {
    double flo = traj.evaluate(lo, component);
    double fhi = traj.evaluate(hi, component);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double fm = traj.evaluate(mid, component);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace solcurve::ode

#endif  // SOLCURVE_ODE_HPP
