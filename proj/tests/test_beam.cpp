#include <catch_amalgamated.hpp>

#include <cmath>

#include "solcurve/beam.hpp"
#include "solcurve/quadrature.hpp"

using namespace solcurve;
using namespace solcurve::beam;

TEST_CASE("constant load closed form (1 - x^2)^2") {
    auto f = catalog::one();
    auto traj = beam_ivp(24.0, -4.0, 1.0, f);
    REQUIRE(traj.status == ode::IntegrationStatus::ReachedEnd);
    CHECK(std::abs(traj.final_state()[0]) <= 1e-10);
    CHECK(std::abs(traj.final_state()[1]) <= 1e-10);
    for (double x : {0.2, 0.5, 0.8}) {
        double expect = (1.0 - x * x) * (1.0 - x * x);
        CHECK(traj.evaluate(x, 0) == Catch::Approx(expect).margin(1e-10));
    }
}

TEST_CASE("zero load gives the quadratic") {
    auto f = catalog::one();
    auto traj = beam_ivp(0.0, -1.5, 2.0, f);
    for (double x : {0.3, 0.7, 1.0})
        CHECK(traj.evaluate(x, 0) == Catch::Approx(2.0 - 0.75 * x * x).margin(1e-12));
}

TEST_CASE("residuals at reference points") {
    auto f = catalog::one();
    auto [F0, G0] = beam_residual(24.0, -4.0, 1.0, f);
    CHECK(std::abs(F0) <= 1e-10);
    CHECK(std::abs(G0) <= 1e-10);
    auto [F1, G1] = beam_residual(0.0, 0.0, 1.0, f);
    CHECK(F1 == Catch::Approx(1.0));
    CHECK(std::abs(G1) <= 1e-12);
}

TEST_CASE("endpoint residuals equal the kernel quadrature") {
    // representation formula: u(1) = lambda int (1-t)^3/3! f(u) + alpha + beta/2,
    // u'(1) = lambda int (1-t)^2/2 f(u) + beta
    auto f = catalog::perturbed_gelfand(5.0);
    double lambda = 3.0, beta = -1.2, alpha = 0.8;
    auto traj = beam_ivp(lambda, beta, alpha, f);
    REQUIRE(traj.status == ode::IntegrationStatus::ReachedEnd);
    double F = traj.final_state()[0], G = traj.final_state()[1];
    double Fq = lambda * quad::gauss_legendre(
                             [&](double t) {
                                 double w = 1.0 - t;
                                 return w * w * w / 6.0 * f.value(traj.evaluate(t, 0));
                             },
                             0.0, 1.0, 64) +
                alpha + beta / 2.0;
    double Gq = lambda * quad::gauss_legendre(
                             [&](double t) {
                                 double w = 1.0 - t;
                                 return w * w / 2.0 * f.value(traj.evaluate(t, 0));
                             },
                             0.0, 1.0, 64) +
                beta;
    CHECK(std::abs(F - Fq) <= 1e-9);
    CHECK(std::abs(G - Gq) <= 1e-9);
}

TEST_CASE("jacobian for the constant load") {
    auto f = catalog::one();
    auto traj = beam_ivp(7.0, -2.0, 1.0, f);
    Jacobian2 j = beam_jacobian(7.0, -2.0, 1.0, f, traj);
    CHECK(j.f_lambda == Catch::Approx(1.0 / 24.0).epsilon(1e-9));
    CHECK(j.f_beta == Catch::Approx(0.5).epsilon(1e-9));
    CHECK(j.g_lambda == Catch::Approx(1.0 / 6.0).epsilon(1e-9));
    CHECK(j.g_beta == Catch::Approx(1.0).epsilon(1e-9));
    CHECK(j.det() == Catch::Approx(-1.0 / 24.0).epsilon(1e-8));
}

TEST_CASE("jacobian matches finite differences at a nonlinear point") {
    auto f = catalog::perturbed_gelfand(5.0);
    double lambda = 5.0, beta = -2.0, alpha = 1.5;
    auto traj = beam_ivp(lambda, beta, alpha, f);
    Jacobian2 j = beam_jacobian(lambda, beta, alpha, f, traj);
    double h = 1e-6 * std::max(1.0, std::abs(lambda));
    auto [Fp, Gp] = beam_residual(lambda + h, beta, alpha, f);
    auto [Fm, Gm] = beam_residual(lambda - h, beta, alpha, f);
    CHECK(std::abs((Fp - Fm) / (2 * h) - j.f_lambda) / std::max(1.0, std::abs(j.f_lambda)) <=
          1e-5);
    CHECK(std::abs((Gp - Gm) / (2 * h) - j.g_lambda) / std::max(1.0, std::abs(j.g_lambda)) <=
          1e-5);
    double hb = 1e-6 * std::max(1.0, std::abs(beta));
    auto [Fpb, Gpb] = beam_residual(lambda, beta + hb, alpha, f);
    auto [Fmb, Gmb] = beam_residual(lambda, beta - hb, alpha, f);
    CHECK(std::abs((Fpb - Fmb) / (2 * hb) - j.f_beta) / std::max(1.0, std::abs(j.f_beta)) <=
          1e-5);
    CHECK(std::abs((Gpb - Gmb) / (2 * hb) - j.g_beta) / std::max(1.0, std::abs(j.g_beta)) <=
          1e-5);
}

TEST_CASE("lambda direction at lambda = 0 via quadruple kernel") {
    // u_l'''' = f(alpha + beta x^2/2) when lambda = 0
    auto f = catalog::perturbed_gelfand(5.0);
    double beta = -1.0, alpha = 1.0;
    auto traj = beam_ivp(0.0, beta, alpha, f);
    Jacobian2 j = beam_jacobian(0.0, beta, alpha, f, traj);
    double expect = quad::gauss_legendre(
        [&](double t) {
            double w = 1.0 - t;
            return w * w * w / 6.0 * f.value(alpha + beta * t * t / 2.0);
        },
        0.0, 1.0, 64);
    CHECK(j.f_lambda == Catch::Approx(expect).epsilon(1e-9));
}

TEST_CASE("newton is exact for the linear system") {
    auto f = catalog::one();
    BeamState st = beam_newton(1.0, 3.0, 1.0, f);
    REQUIRE(st.report.converged);
    CHECK(st.report.steps == 1);
    CHECK(st.lambda == Catch::Approx(24.0).margin(1e-8));
    CHECK(st.beta == Catch::Approx(-4.0).margin(1e-9));
}

TEST_CASE("newton survives a blow-up start") {
    auto f = catalog::perturbed_gelfand(5.0);
    BeamState st = beam_newton(1.0, 1e8, -4.0, f);
    // either the back-off converges or the failure is reported cleanly
    if (!st.report.converged) CHECK_FALSE(st.report.failure.empty());
    else CHECK(std::abs(st.u.final_state()[0]) <= 1e-9);
}

TEST_CASE("beam curve for the constant load") {
    auto f = catalog::one();
    SolutionCurve c = beam_curve(0.0, 0.5, 8, f);
    REQUIRE(c.points.size() == 8);
    for (const auto& p : c.points) {
        CHECK(p.lambda == Catch::Approx(24.0 * p.alpha).epsilon(1e-9));
        REQUIRE(p.beta.has_value());
        CHECK(*p.beta == Catch::Approx(-4.0 * p.alpha).epsilon(1e-9));
    }
}

TEST_CASE("perturbed-Gelfand load: converged points are positive with beta <= 0") {
    auto f = catalog::perturbed_gelfand(5.0);
    SolutionCurve c = beam_curve(0.0, 0.25, 8, f);
    REQUIRE(c.points.size() == 8);
    for (const auto& p : c.points) {
        REQUIRE(p.beta.has_value());
        CHECK(*p.beta <= 0.0);
        REQUIRE(p.newton.has_value());
        CHECK(p.newton->converged);
        CHECK(p.newton->steps <= 6);  // warm starts keep the iteration short
    }
    // positivity and boundary residuals of the last point
    BeamState st = beam_newton(c.points.back().alpha, c.points.back().lambda,
                               *c.points.back().beta, f);
    REQUIRE(st.report.converged);
    CHECK(std::abs(st.u.final_state()[0]) <= 1e-8);
    CHECK(std::abs(st.u.final_state()[1]) <= 1e-8);
    for (int i = 0; i < 100; ++i) {
        double x = i / 100.0;
        CHECK(st.u.evaluate(x, 0) > 0.0);
    }
}

TEST_CASE("non-autonomous load is accepted with a warning") {
    auto f = parse_nonlinearity("(2 - x)*exp(u/(1 + u))", {"x", "u"});
    REQUIRE(f.nonautonomous);
    SolutionCurve c = beam_curve(0.0, 0.2, 3, f);
    bool warned = false;
    for (const auto& w : c.meta.warnings)
        if (w.find("non-autonomous") != std::string::npos) warned = true;
    CHECK(warned);
    CHECK(c.points.size() == 3);
}
