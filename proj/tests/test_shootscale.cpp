#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "solcurve/nonauto.hpp"
#include "solcurve/shootscale.hpp"

using namespace solcurve;
using std::numbers::pi;

namespace {

ProblemSpec radial(Family fam, int n, Nonlinearity f) {
    ProblemSpec p;
    p.family = fam;
    p.n = n;
    p.f = std::move(f);
    return p;
}

}  // namespace

TEST_CASE("constant source, n = 1: quadratic closed form") {
    // v = alpha - r^2/2, root at sqrt(2 alpha)
    auto pr = radial(Family::RadialDirichlet, 1, catalog::one());
    ShootResult r = shoot(pr, 2.0);
    CHECK(r.kind == ShootKind::VRoot);
    CHECK(r.r_star == Catch::Approx(2.0).margin(1e-9));
    CHECK(r.lambda == Catch::Approx(4.0).margin(1e-8));
}

TEST_CASE("linear source, n = 3: lambda = pi^2 independent of alpha") {
    auto pr = radial(Family::RadialDirichlet, 3, catalog::identity());
    for (double alpha : {1.0, 5.0, 9.0}) {
        ShootResult r = shoot(pr, alpha);
        CHECK(r.kind == ShootKind::VRoot);
        CHECK(r.lambda == Catch::Approx(pi * pi).margin(1e-7));
    }
}

TEST_CASE("cubic below the equilibrium: v' root comes first") {
    auto pr = radial(Family::RadialNeumann, 1, catalog::cubic());
    ShootResult r = shoot(pr, 0.9);
    CHECK(r.kind == ShootKind::VPrimeRoot);
    CHECK_FALSE(r.degenerate);
    CHECK(r.trajectory.final_state()[0] > 0.0);
    // linearization at u = 1 (f'(1) = 6): lambda -> pi^2/6 as alpha -> 1
    ShootResult close = shoot(pr, 0.999);
    CHECK(close.lambda == Catch::Approx(pi * pi / 6.0).margin(5e-3));
    CHECK(std::abs(close.lambda - pi * pi / 6.0) < std::abs(r.lambda - pi * pi / 6.0));
}

TEST_CASE("dirichlet curve for the linear source is flat") {
    auto pr = radial(Family::RadialDirichlet, 3, catalog::identity());
    SolutionCurve c = dirichlet_curve(pr, 0.0, 1.0, 10);
    REQUIRE(c.points.size() == 10);
    REQUIRE(c.branches.size() == 1);
    for (const auto& p : c.points) CHECK(p.lambda == Catch::Approx(pi * pi).margin(1e-6));
    CHECK(detect_folds(c).empty());
    // alpha-injectivity as a data property
    std::set<double> alphas;
    for (const auto& p : c.points) alphas.insert(p.alpha);
    CHECK(alphas.size() == c.points.size());
}

TEST_CASE("scaling check: accepted points satisfy the BVP") {
    // re-integrating u'' + ((n-1)/r) u' + lambda f(u) = 0 from u(0) = alpha
    // must give |u(1)| small (the shoot-and-scale identity)
    auto pr = radial(Family::RadialDirichlet, 3, catalog::gelfand());
    for (double alpha : {0.5, 1.0, 3.0}) {
        ShootResult r = shoot(pr, alpha);
        REQUIRE(r.kind == ShootKind::VRoot);
        ProblemSpec npr = radial(Family::NonAutonomousRadial, 3, catalog::gelfand());
        auto traj = nonauto::ivp_at(npr, r.lambda, alpha);
        REQUIRE(traj.status == ode::IntegrationStatus::ReachedEnd);
        CHECK(std::abs(traj.final_state()[0]) <= 1e-6);
    }
}

TEST_CASE("monotonicity of the shot solution for positive f") {
    auto pr = radial(Family::RadialDirichlet, 3, catalog::gelfand());
    ShootResult r = shoot(pr, 1.0);
    REQUIRE(r.kind == ShootKind::VRoot);
    for (int i = 1; i < 200; ++i) {
        double rr = r.trajectory.t_begin() +
                    (r.r_star - r.trajectory.t_begin()) * i / 200.0;
        CHECK(r.trajectory.evaluate(rr, 1) < 0.0);
    }
}

TEST_CASE("eps robustness of lambda") {
    auto pr = radial(Family::RadialDirichlet, 3, catalog::oscillatory());
    for (double alpha : {1.0, 5.0}) {
        ShootOptions a, b;
        a.eps = 1e-8;
        b.eps = 1e-9;
        double la = shoot(pr, alpha, a).lambda;
        double lb = shoot(pr, alpha, b).lambda;
        CHECK(std::abs(la - lb) / std::abs(la) <= 1e-8);
    }
}

TEST_CASE("neumann sweep skips the equilibrium and stays fold-free (n = 1)") {
    auto pr = radial(Family::RadialNeumann, 1, catalog::cubic());
    SolutionCurve c = neumann_curve(pr, 0.5, 0.05, 20);  // alpha 0.55..1.50, hits 1.0
    // the alpha = 1 grid point is skipped and flagged
    bool skipped = false;
    for (const auto& rej : c.meta.rejected)
        if (std::abs(rej.alpha - 1.0) < 1e-12) skipped = true;
    CHECK(skipped);
    bool flagged = false;
    for (const auto& w : c.meta.warnings)
        if (w.find("constant solution") != std::string::npos) flagged = true;
    CHECK(flagged);
    REQUIRE(c.points.size() >= 15);
    // both half-branches emanate near pi^2/6 and have no folds
    for (const auto& p : c.points)
        if (std::abs(p.alpha - 1.0) <= 0.06)
            CHECK(p.lambda == Catch::Approx(pi * pi / 6.0).margin(0.05));
    CHECK(detect_folds(c).empty());
    for (const auto& p : c.points) CHECK(p.terminal == Terminal::NeumannCritical);
}

TEST_CASE("supercritical termination recovers the dirichlet root") {
    auto pr = radial(Family::RadialDirichlet, 3, catalog::lin_ni(4.0));
    pr.q = 4.0;
    ShootOptions normal;
    ShootOptions super;
    super.supercritical = true;
    ShootResult a = shoot(pr, 1.0, normal);
    ShootResult b = shoot(pr, 1.0, super);
    REQUIRE(a.kind == ShootKind::VRoot);
    REQUIRE(b.kind == ShootKind::WentNegative);
    CHECK(b.lambda == Catch::Approx(a.lambda).epsilon(1e-9));
}

TEST_CASE("invalid alpha is rejected") {
    auto pr = radial(Family::RadialDirichlet, 3, catalog::identity());
    CHECK_THROWS_AS(shoot(pr, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(shoot(pr, -1.0), std::invalid_argument);
}
