#ifndef SOLCURVE_NONLINEARITY_HPP
#define SOLCURVE_NONLINEARITY_HPP

/// \file nonlinearity.hpp
/// Evaluator bundle for a nonlinearity f: value, u-derivative, and (for
/// non-autonomous problems) the spatial derivative. Instances come either
/// from the built-in catalog (native code, independent of the parser) or
/// from parse_nonlinearity, which differentiates the expression tree
/// symbolically.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "solcurve/expr.hpp"

namespace solcurve {

/// f and its derivatives. The first argument is the spatial variable
/// (r for radial problems, x for the beam and the harmonic forcing);
/// autonomous nonlinearities ignore it. Immutable after construction.
struct Nonlinearity {
    using Fn = std::function<double(double, double)>;

    std::string name;        // catalog identifier or source text
    Fn f;                    // f(s, u)
    Fn fu;                   // df/du
    Fn fr;                   // df/ds, only when non-autonomous
    bool nonautonomous = false;
    std::string spatial_var = "r";

    // expression trees, present when built by the parser
    expr::NodePtr tree, tree_u, tree_r;

    double value(double s, double u) const { return f(s, u); }
    double value(double u) const { return f(0.0, u); }
    double du(double s, double u) const { return fu(s, u); }
    double du(double u) const { return fu(0.0, u); }
    double dr(double s, double u) const { return fr(s, u); }

    bool valid() const { return static_cast<bool>(f); }
};

/// Builds a Nonlinearity from an expression string. `vars` is the allowed
/// variable set; it may contain "u" and at most one spatial name ("r" or
/// "x"). The u- and spatial derivatives are constructed symbolically.
inline Nonlinearity parse_nonlinearity(std::string_view text,
                                       std::vector<std::string> vars = {"u"}) {
    std::string spatial;
    bool has_u = false;
    for (const auto& v : vars) {
        if (v == "u") {
            has_u = true;
        } else if (v == "r" || v == "x") {
            if (!spatial.empty())
                throw std::invalid_argument("at most one spatial variable allowed");
            spatial = v;
        } else {
            throw std::invalid_argument("unsupported variable name '" + v + "'");
        }
    }
    (void)has_u;

    Nonlinearity nl;
    nl.name = std::string(text);
    nl.tree = expr::parse(text, vars);
    nl.tree_u = expr::derivative(nl.tree, "u");
    nl.spatial_var = spatial.empty() ? "r" : spatial;
    nl.nonautonomous = !spatial.empty() && expr::references(*nl.tree, spatial);
    if (nl.nonautonomous) nl.tree_r = expr::derivative(nl.tree, spatial);

    auto make_eval = [spatial_name = nl.spatial_var](expr::NodePtr tree) {
        return [tree, spatial_name](double s, double u) {
            expr::Bindings env;
            env.vars = {{spatial_name, s}, {"u", u}};
            return expr::evaluate(*tree, env);
        };
    };
    nl.f = make_eval(nl.tree);
    nl.fu = make_eval(nl.tree_u);
    if (nl.tree_r) nl.fr = make_eval(nl.tree_r);
    return nl;
}

// --- catalog ---------------------------------------------------------------
// Every nonlinearity used in the worked problems, with hand-written
// derivatives. Names are stable CLI identifiers.

namespace catalog {

inline Nonlinearity make(std::string name, Nonlinearity::Fn f, Nonlinearity::Fn fu,
                         Nonlinearity::Fn fr = {}) {
    Nonlinearity nl;
    nl.name = std::move(name);
    nl.f = std::move(f);
    nl.fu = std::move(fu);
    nl.fr = std::move(fr);
    nl.nonautonomous = static_cast<bool>(nl.fr);
    return nl;
}

/// f(u) = u
inline Nonlinearity identity() {
    return make("identity", [](double, double u) { return u; }, [](double, double) { return 1.0; });
}

/// f(u) = 1
inline Nonlinearity one() {
    return make("one", [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
}

/// f(u) = u + u sin(u) / 2
inline Nonlinearity oscillatory() {
    return make(
        "oscillatory", [](double, double u) { return u + 0.5 * u * std::sin(u); },
        [](double, double u) { return 1.0 + 0.5 * std::sin(u) + 0.5 * u * std::cos(u); });
}

/// f(u) = u (u - 1) (7 - u)
inline Nonlinearity cubic() {
    return make(
        "cubic", [](double, double u) { return u * (u - 1.0) * (7.0 - u); },
        [](double, double u) { return -3.0 * u * u + 16.0 * u - 7.0; });
}

/// f(u) = e^u
inline Nonlinearity gelfand() {
    return make("gelfand", [](double, double u) { return std::exp(u); },
                [](double, double u) { return std::exp(u); });
}

/// f(r, u) = (1 - 1.1 r^2) e^u
inline Nonlinearity gelfand_sign_changing() {
    return make(
        "gelfand_sign_changing",
        [](double r, double u) { return (1.0 - 1.1 * r * r) * std::exp(u); },
        [](double r, double u) { return (1.0 - 1.1 * r * r) * std::exp(u); },
        [](double r, double u) { return -2.2 * r * std::exp(u); });
}

/// f(u) = e^{a u / (a + u)}
inline Nonlinearity perturbed_gelfand(double a = 5.0) {
    return make(
        "perturbed_gelfand",
        [a](double, double u) { return std::exp(a * u / (a + u)); },
        [a](double, double u) {
            double d = a + u;
            return std::exp(a * u / d) * a * a / (d * d);
        });
}

/// f(u) = sin(u)
inline Nonlinearity sine() {
    return make("sine", [](double, double u) { return std::sin(u); },
                [](double, double u) { return std::cos(u); });
}

/// f(u) = 6u / (1 + u + 2u^2)
inline Nonlinearity castro() {
    return make(
        "castro",
        [](double, double u) { return 6.0 * u / (1.0 + u + 2.0 * u * u); },
        [](double, double u) {
            double d = 1.0 + u + 2.0 * u * u;
            return 6.0 * (1.0 - 2.0 * u * u) / (d * d);
        });
}

/// f(u) = u^q + u^{2q-1}, extended oddly (u |u|^{q-1} + u |u|^{2q-2}) so the
/// supercritical termination rule can probe slightly negative u.
inline Nonlinearity lin_ni(double q = 4.0) {
    return make(
        "lin_ni",
        [q](double, double u) {
            double au = std::abs(u);
            return u * std::pow(au, q - 1.0) + u * std::pow(au, 2.0 * q - 2.0);
        },
        [q](double, double u) {
            double au = std::abs(u);
            return q * std::pow(au, q - 1.0) + (2.0 * q - 1.0) * std::pow(au, 2.0 * q - 2.0);
        });
}

/// Lookup by stable CLI name; parameterized entries use their defaults
/// (perturbed_gelfand a = 5, lin_ni q = 4). Returns an invalid bundle when
/// the name is not in the catalog.
inline Nonlinearity by_name(const std::string& name) {
    if (name == "identity") return identity();
    if (name == "one") return one();
    if (name == "oscillatory") return oscillatory();
    if (name == "cubic") return cubic();
    if (name == "gelfand") return gelfand();
    if (name == "gelfand_sign_changing") return gelfand_sign_changing();
    if (name == "perturbed_gelfand") return perturbed_gelfand();
    if (name == "sine") return sine();
    if (name == "castro") return castro();
    if (name == "lin_ni") return lin_ni();
    return {};
}

inline std::vector<std::string> names() {
    return {"identity", "one",  "oscillatory", "cubic", "gelfand", "gelfand_sign_changing",
            "perturbed_gelfand", "sine", "castro", "lin_ni"};
}

}  // namespace catalog
}  // namespace solcurve

#endif  // SOLCURVE_NONLINEARITY_HPP
