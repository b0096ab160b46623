#include <catch_amalgamated.hpp>

#include <cmath>

#include "solcurve/nonauto.hpp"

using namespace solcurve;
using nonauto::ivp_at;
using nonauto::newton_lambda;
using nonauto::variational_at;

namespace {

ProblemSpec gelfand_problem(int n) {
    ProblemSpec p;
    p.family = Family::NonAutonomousRadial;
    p.n = n;
    p.f = catalog::gelfand_sign_changing();
    return p;
}

ProblemSpec constant_problem(int n) {
    ProblemSpec p;
    p.family = Family::NonAutonomousRadial;
    p.n = n;
    p.f = catalog::one();
    return p;
}

}  // namespace

TEST_CASE("constant source closed form u = alpha - lambda r^2 / 6") {
    auto pr = constant_problem(3);
    auto traj = ivp_at(pr, 6.0, 1.0);
    REQUIRE(traj.status == ode::IntegrationStatus::ReachedEnd);
    CHECK(std::abs(traj.final_state()[0]) <= 1e-12);
    for (double r : {0.25, 0.5, 0.75})
        CHECK(traj.evaluate(r, 0) == Catch::Approx(1.0 - r * r).margin(1e-10));
}

TEST_CASE("lambda = 0 decouples the problem") {
    auto pr = gelfand_problem(3);
    auto traj = ivp_at(pr, 0.0, 2.5);
    REQUIRE(traj.status == ode::IntegrationStatus::ReachedEnd);
    CHECK(traj.final_state()[0] == Catch::Approx(2.5).margin(1e-12));
}

TEST_CASE("variational solution for the constant source") {
    auto pr = constant_problem(3);
    for (double lambda : {0.0, 6.0}) {
        auto u = ivp_at(pr, lambda, 1.0);
        auto ul = variational_at(pr, lambda, 1.0, u);
        REQUIRE(ul.status == ode::IntegrationStatus::ReachedEnd);
        CHECK(ul.final_state()[0] == Catch::Approx(-1.0 / 6.0).margin(1e-10));
        CHECK(ul.evaluate(0.5, 0) == Catch::Approx(-0.25 / 6.0).margin(1e-10));
    }
}

TEST_CASE("variational derivative matches finite differences of F") {
    auto pr = gelfand_problem(3);
    for (double lambda : {0.8, 1.6}) {
        double alpha = 2.0;
        auto u = ivp_at(pr, lambda, alpha);
        auto ul = variational_at(pr, lambda, alpha, u);
        double exact = ul.final_state()[0];
        double h = 1e-6 * std::max(1.0, std::abs(lambda));
        double fp = ivp_at(pr, lambda + h, alpha).final_state()[0];
        double fm = ivp_at(pr, lambda - h, alpha).final_state()[0];
        double approx = (fp - fm) / (2.0 * h);
        CHECK(std::abs(exact - approx) / std::max(1.0, std::abs(exact)) <= 1e-5);
    }
}

TEST_CASE("newton on the linear problem converges in one iteration") {
    auto pr = constant_problem(3);
    auto nr = newton_lambda(pr, 1.0, 0.0);
    REQUIRE(nr.report.converged);
    CHECK(nr.lambda == Catch::Approx(6.0).margin(1e-9));
    CHECK(nr.report.steps == 1);
}

TEST_CASE("newton reproduces the Gelfand point at alpha = 9.1") {
    auto pr = gelfand_problem(3);
    auto nr = newton_lambda(pr, 9.1, 2.5);
    REQUIRE(nr.report.converged);
    CHECK(nr.lambda == Catch::Approx(2.59566).margin(1e-3));
    CHECK(std::abs(nr.u.final_state()[0]) <= 1e-9);
}

TEST_CASE("autonomous cross-check against shoot-and-scale") {
    ProblemSpec pr;
    pr.family = Family::NonAutonomousRadial;
    pr.n = 3;
    pr.f = catalog::gelfand();
    ProblemSpec sp;
    sp.family = Family::RadialDirichlet;
    sp.n = 3;
    sp.f = catalog::gelfand();
    double reference = shoot(sp, 1.0).lambda;
    auto nr = newton_lambda(pr, 1.0, 0.9 * reference);
    REQUIRE(nr.report.converged);
    CHECK(std::abs(nr.lambda - reference) / reference <= 1e-7);
}

TEST_CASE("newton survives a blow-up initial guess") {
    auto pr = gelfand_problem(3);
    auto nr = newton_lambda(pr, 1.0, 1e6);
    CHECK(nr.report.converged);  // the back-off finds the solvable regime
}

TEST_CASE("quadratic convergence ratio stays bounded") {
    auto pr = gelfand_problem(3);
    auto nr = newton_lambda(pr, 2.0, 0.1);
    REQUIRE(nr.report.converged);
    for (std::size_t i = 0; i + 1 < nr.report.iterates.size(); ++i) {
        double fk = nr.report.iterates[i].second;
        double fk1 = nr.report.iterates[i + 1].second;
        if (fk > 1e-2 || fk < 1e-9 || fk1 < 1e-14) continue;
        CHECK(fk1 / (fk * fk) < 1e4);
    }
}

TEST_CASE("endpoint residual equals the integral representation") {
    for (int n : {3, 2}) {  // n = 2 exercises the logarithmic kernel
        auto pr = gelfand_problem(n);
        double lambda = 1.3, alpha = 2.0;
        auto u = ivp_at(pr, lambda, alpha);
        REQUIRE(u.status == ode::IntegrationStatus::ReachedEnd);
        double direct = u.final_state()[0];
        double integral = nonauto::residual_by_quadrature(pr, lambda, alpha, u);
        INFO("n = " << n);
        CHECK(std::abs(direct - integral) <= 1e-8 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("continuation on the linear problem gives lambda = 6 alpha") {
    auto pr = constant_problem(3);
    auto curve = nonauto::continue_in_alpha(pr, 0.0, 1.0, 5);
    REQUIRE(curve.points.size() == 5);
    for (const auto& p : curve.points)
        CHECK(p.lambda == Catch::Approx(6.0 * p.alpha).epsilon(1e-9));
}

TEST_CASE("sign condition on f_r is checked") {
    ProblemSpec ok;
    ok.family = Family::NonAutonomousRadial;
    ok.n = 3;
    ok.f = parse_nonlinearity("(1 - 0.5*r^2)*exp(u)", {"r", "u"});
    auto c1 = nonauto::continue_in_alpha(ok, 0.0, 0.2, 3);
    for (const auto& w : c1.meta.warnings) CHECK(w.find("f_r > 0") == std::string::npos);

    ProblemSpec bad;
    bad.family = Family::NonAutonomousRadial;
    bad.n = 3;
    bad.f = parse_nonlinearity("(1 + r^2)*exp(u)", {"r", "u"});
    auto c2 = nonauto::continue_in_alpha(bad, 0.0, 0.2, 3);
    bool warned = false;
    for (const auto& w : c2.meta.warnings)
        if (w.find("f_r > 0") != std::string::npos) warned = true;
    CHECK(warned);
}

TEST_CASE("warm-start continuity: halving the step halves the max jump") {
    ProblemSpec pr;
    pr.family = Family::NonAutonomousRadial;
    pr.n = 3;
    pr.f = parse_nonlinearity("(1 - 0.5*r^2)*exp(u)", {"r", "u"});
    auto max_jump = [&](double d, int steps) {
        auto c = nonauto::continue_in_alpha(pr, 0.3, d, steps);
        REQUIRE(c.points.size() == static_cast<std::size_t>(steps));
        double m = 0.0;
        for (std::size_t i = 1; i < c.points.size(); ++i)
            m = std::max(m, std::abs(c.points[i].lambda - c.points[i - 1].lambda));
        return m;
    };
    double coarse = max_jump(0.06, 10);
    double fine = max_jump(0.03, 20);
    CHECK(fine / coarse == Catch::Approx(0.5).margin(0.1));
}
