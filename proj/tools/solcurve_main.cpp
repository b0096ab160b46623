// solcurve CLI: computes global solution curves from a declarative config
// and writes them as CSV (optionally SVG); `profile` emits one dense
// solution profile at a requested parameter value.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "solcurve/runner.hpp"

namespace {

struct Overrides {
    std::optional<int> jobs;
    std::optional<std::string> svg;
    std::optional<double> tol_rel, tol_abs, seed_lambda;
    std::optional<std::string> mode;
};

void apply(const Overrides& ov, solcurve::config::RunConfig& cfg) {
    if (ov.jobs) cfg.jobs = *ov.jobs;
    if (ov.svg) cfg.svg_path = *ov.svg;
    if (ov.tol_rel) cfg.tol.rel = *ov.tol_rel;
    if (ov.tol_abs) cfg.tol.abs = *ov.tol_abs;
    if (ov.seed_lambda) cfg.seed_lambda = *ov.seed_lambda;
    if (ov.mode) {
        if (*ov.mode == "regularized") cfg.plaplace_mode = solcurve::PlaplaceMode::Regularized;
        else if (*ov.mode == "naive") cfg.plaplace_mode = solcurve::PlaplaceMode::Naive;
        else throw solcurve::config::ConfigError("--mode must be naive or regularized");
    }
}

void add_overrides(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--jobs", ov.jobs, "worker count for shoot-and-scale sweeps");
    cmd->add_option("--svg", ov.svg, "also render the curve to this SVG path");
    cmd->add_option("--tol-rel", ov.tol_rel, "relative integration tolerance");
    cmd->add_option("--tol-abs", ov.tol_abs, "absolute integration tolerance");
    cmd->add_option("--seed-lambda", ov.seed_lambda, "initial lambda for Newton families");
    cmd->add_option("--mode", ov.mode, "p-Laplace mode: naive|regularized");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"global solution curves by continuation in global parameters"};
    app.require_subcommand(1);

    std::string run_config_path, profile_config_path, profile_out;
    double profile_value = 0.0;
    Overrides run_ov, prof_ov;

    CLI::App* run_cmd = app.add_subcommand("run", "compute a solution curve and write CSV/SVG");
    run_cmd->add_option("config", run_config_path, "config file path")->required();
    add_overrides(run_cmd, run_ov);

    CLI::App* prof_cmd =
        app.add_subcommand("profile", "compute one solution profile u(r) or u(x)");
    prof_cmd->add_option("config", profile_config_path, "config file path")->required();
    prof_cmd->add_option("--at", profile_value, "alpha (or xi) of the requested solution")
        ->required();
    prof_cmd->add_option("--out", profile_out, "profile CSV path (default: profile.csv)");
    add_overrides(prof_cmd, prof_ov);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            solcurve::config::RunConfig cfg = solcurve::config::load_config(run_config_path);
            apply(run_ov, cfg);
            auto outcome = solcurve::runner::run(cfg);
            if (outcome.exit_code != 0) std::cerr << "solcurve: " << outcome.status << '\n';
            else
                std::cout << "wrote " << outcome.curve.points.size() << " points in "
                          << outcome.curve.branches.size() << " branch(es)\n";
            return outcome.exit_code;
        }
        solcurve::config::RunConfig cfg = solcurve::config::load_config(profile_config_path);
        apply(prof_ov, cfg);
        std::string out_path = !profile_out.empty()
                                   ? profile_out
                                   : (!cfg.csv_path.empty() ? cfg.csv_path : "profile.csv");
        int code = solcurve::runner::profile_to_file(cfg, profile_value, out_path);
        if (code != 0) std::cerr << "solcurve: profile failed (exit " << code << ")\n";
        return code;
    } catch (const solcurve::config::ConfigError& ex) {
        std::cerr << "solcurve: config error: " << ex.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "solcurve: config error: " << ex.what() << '\n';
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "solcurve: " << ex.what() << '\n';
        return 2;
    }
}
