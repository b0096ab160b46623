#ifndef SOLCURVE_CONFIG_HPP
#define SOLCURVE_CONFIG_HPP

/// \file config.hpp
/// Flat INI-style run configuration: one [section] per concern, key = value
/// lines, full-line comments with '#' or ';'. Unknown sections or keys are
/// rejected with their line number. See the README for the schema.

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "solcurve/harmonic.hpp"
#include "solcurve/nonlinearity.hpp"
#include "solcurve/plaplace.hpp"
#include "solcurve/problem.hpp"

namespace solcurve::config {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what) {}
};

struct RunConfig {
    ProblemSpec problem;

    double grid_start = 0.0;
    double grid_step = 0.0;
    int grid_count = 0;

    ode::Tolerances tol{};
    double event_tol = 1e-12;
    double newton_tol = 1e-10;

    bool supercritical = false;
    PlaplaceMode plaplace_mode = PlaplaceMode::Regularized;
    harmonic::HarmonicOptions::WarmStart warm_start =
        harmonic::HarmonicOptions::WarmStart::Previous;
    double eps = 1e-8;
    double tend = 1000.0;
    double h_z = 1e-3;
    double h_r = 1e-5;
    double negative_floor = 1e-8;
    int jobs = 1;
    std::optional<double> seed_lambda;
    std::optional<double> seed_beta;

    std::string csv_path;
    std::string svg_path;

    std::string f_text;  // as written in the config
    std::string e_text;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'", line);
    }
}

inline int to_int(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + v + "'", line);
    }
}

inline bool to_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected true/false, got '" + v + "'", line);
}

inline Family to_family(const std::string& v, int line) {
    if (v == "radial_dirichlet") return Family::RadialDirichlet;
    if (v == "radial_neumann") return Family::RadialNeumann;
    if (v == "plaplace_dirichlet") return Family::PLaplaceDirichlet;
    if (v == "nonauto_radial") return Family::NonAutonomousRadial;
    if (v == "clamped_beam") return Family::ClampedBeam;
    if (v == "harmonic_forced") return Family::HarmonicForced;
    throw ConfigError("unknown family '" + v + "'", line);
}

/// Allowed variables for a user expression f, per family.
inline std::vector<std::string> f_vars(Family fam) {
    switch (fam) {
        case Family::NonAutonomousRadial: return {"u", "r"};
        case Family::ClampedBeam: return {"u", "x"};
        default: return {"u"};
    }
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string section;
    std::string line;
    int lineno = 0;
    bool have_family = false, have_f = false;
    bool have_start = false, have_step = false, have_count = false;

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("malformed section header", lineno);
            section = t.substr(1, t.size() - 2);
            if (section != "problem" && section != "grid" && section != "tolerances" &&
                section != "mode" && section != "output")
                throw ConfigError("unknown section [" + section + "]", lineno);
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
        std::string key = detail::trim(t.substr(0, eq));
        std::string val = detail::trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno);
        if (section.empty()) throw ConfigError("key outside of any section", lineno);

        if (section == "problem") {
            if (key == "family") {
                cfg.problem.family = detail::to_family(val, lineno);
                have_family = true;
            } else if (key == "f") {
                cfg.f_text = val;
                have_f = true;
            } else if (key == "e") {
                cfg.e_text = val;
            } else if (key == "n") {
                cfg.problem.n = detail::to_int(val, lineno);
            } else if (key == "p") {
                cfg.problem.p = detail::to_double(val, lineno);
            } else if (key == "q") {
                cfg.problem.q = detail::to_double(val, lineno);
            } else if (key == "k") {
                cfg.problem.k = detail::to_int(val, lineno);
            } else {
                throw ConfigError("unknown key '" + key + "' in [problem]", lineno);
            }
        } else if (section == "grid") {
            if (key == "start") {
                cfg.grid_start = detail::to_double(val, lineno);
                have_start = true;
            } else if (key == "step") {
                cfg.grid_step = detail::to_double(val, lineno);
                have_step = true;
            } else if (key == "count") {
                cfg.grid_count = detail::to_int(val, lineno);
                have_count = true;
            } else {
                throw ConfigError("unknown key '" + key + "' in [grid]", lineno);
            }
        } else if (section == "tolerances") {
            if (key == "rel") cfg.tol.rel = detail::to_double(val, lineno);
            else if (key == "abs") cfg.tol.abs = detail::to_double(val, lineno);
            else if (key == "event") cfg.event_tol = detail::to_double(val, lineno);
            else if (key == "newton") cfg.newton_tol = detail::to_double(val, lineno);
            else throw ConfigError("unknown key '" + key + "' in [tolerances]", lineno);
        } else if (section == "mode") {
            if (key == "supercritical") cfg.supercritical = detail::to_bool(val, lineno);
            else if (key == "plaplace") {
                if (val == "regularized") cfg.plaplace_mode = PlaplaceMode::Regularized;
                else if (val == "naive") cfg.plaplace_mode = PlaplaceMode::Naive;
                else throw ConfigError("plaplace must be regularized|naive", lineno);
            } else if (key == "warm_start") {
                if (val == "previous")
                    cfg.warm_start = harmonic::HarmonicOptions::WarmStart::Previous;
                else if (val == "mode_shape")
                    cfg.warm_start = harmonic::HarmonicOptions::WarmStart::ModeShape;
                else throw ConfigError("warm_start must be previous|mode_shape", lineno);
            } else if (key == "eps") cfg.eps = detail::to_double(val, lineno);
            else if (key == "tend") cfg.tend = detail::to_double(val, lineno);
            else if (key == "h_z") cfg.h_z = detail::to_double(val, lineno);
            else if (key == "h_r") cfg.h_r = detail::to_double(val, lineno);
            else if (key == "negative_floor") cfg.negative_floor = detail::to_double(val, lineno);
            else if (key == "jobs") cfg.jobs = detail::to_int(val, lineno);
            else if (key == "seed_lambda") cfg.seed_lambda = detail::to_double(val, lineno);
            else if (key == "seed_beta") cfg.seed_beta = detail::to_double(val, lineno);
            else throw ConfigError("unknown key '" + key + "' in [mode]", lineno);
        } else if (section == "output") {
            if (key == "csv") cfg.csv_path = val;
            else if (key == "svg") cfg.svg_path = val;
            else throw ConfigError("unknown key '" + key + "' in [output]", lineno);
        }
    }

    if (!have_family) throw ConfigError("[problem] family is required");
    if (!have_f) throw ConfigError("[problem] f is required");
    if (!have_start || !have_step || !have_count)
        throw ConfigError("[grid] start, step and count are required");
    if (cfg.grid_step <= 0.0) throw ConfigError("[grid] step must be positive");
    if (cfg.grid_count < 1) throw ConfigError("[grid] count must be >= 1");
    if (cfg.jobs < 1) throw ConfigError("[mode] jobs must be >= 1");

    // resolve the nonlinearity: catalog name first, expression otherwise
    Nonlinearity f = catalog::by_name(cfg.f_text);
    if (!f.valid()) {
        try {
            f = parse_nonlinearity(cfg.f_text, detail::f_vars(cfg.problem.family));
        } catch (const expr::ParseError& ex) {
            throw ConfigError(std::string("problem.f: ") + ex.what());
        }
    }
    cfg.problem.f = std::move(f);

    if (!cfg.e_text.empty()) {
        if (cfg.problem.family != Family::HarmonicForced)
            throw ConfigError("problem.e is only valid for the harmonic family");
        try {
            cfg.problem.forcing = parse_nonlinearity(cfg.e_text, {"x"});
        } catch (const expr::ParseError& ex) {
            throw ConfigError(std::string("problem.e: ") + ex.what());
        }
    }

    try {
        cfg.problem.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
    }
    if (cfg.plaplace_mode == PlaplaceMode::Regularized &&
        cfg.problem.family == Family::PLaplaceDirichlet && cfg.problem.p < 2.0)
        throw ConfigError("regularized mode requires p >= 2; use plaplace = naive");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace solcurve::config

#endif  // SOLCURVE_CONFIG_HPP
