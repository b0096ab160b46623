#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "solcurve/curve.hpp"

using namespace solcurve;

namespace {

std::vector<CurvePoint> points_from(const std::vector<double>& lambdas,
                                    Terminal term = Terminal::DirichletRoot) {
    std::vector<CurvePoint> pts;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        pts.push_back({0.1 * static_cast<double>(i + 1), lambdas[i], {}, {}, term, {}});
    return pts;
}

}  // namespace

TEST_CASE("fixed-jump splitting") {
    auto curve = split_branches(points_from({1.0, 1.1, 9.0, 9.1}), 2.0);
    REQUIRE(curve.branches.size() == 2);
    CHECK(curve.branches[0].begin == 0);
    CHECK(curve.branches[0].end == 2);
    CHECK(curve.branches[1].begin == 2);
    CHECK(curve.branches[1].end == 4);
}

TEST_CASE("monotone sequence stays a single branch") {
    auto curve = split_branches(points_from({1.0, 2.0, 3.0, 4.0, 5.0}), 100.0);
    REQUIRE(curve.branches.size() == 1);
    CHECK(curve.branches[0].size() == 5);
}

TEST_CASE("terminal change forces a branch boundary") {
    auto pts = points_from({1.0, 1.01, 1.02, 1.03});
    pts[2].terminal = Terminal::WentNegative;
    pts[3].terminal = Terminal::WentNegative;
    auto curve = split_branches(std::move(pts), 100.0);
    REQUIRE(curve.branches.size() == 2);
    CHECK(curve.branches[0].end == 2);
}

TEST_CASE("empty input yields an empty curve") {
    auto curve = split_branches({}, 1.0);
    CHECK(curve.points.empty());
    CHECK(curve.branches.empty());
}

TEST_CASE("splitting preserves the point multiset") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> lambdas;
        for (int i = 0; i < 40; ++i) lambdas.push_back(dist(rng));
        auto pts = points_from(lambdas);
        double jump = dist(rng) * 0.3;
        auto curve = split_branches(pts, jump);

        // concatenating branch slices recovers every point exactly once
        std::vector<double> concat;
        std::size_t covered = 0;
        for (const auto& br : curve.branches) {
            covered += br.size();
            for (std::size_t i = br.begin; i < br.end; ++i)
                concat.push_back(curve.points[i].lambda);
        }
        REQUIRE(covered == pts.size());
        std::vector<double> original = lambdas;
        std::sort(concat.begin(), concat.end());
        std::sort(original.begin(), original.end());
        CHECK(concat == original);
    }
}

TEST_CASE("adaptive splitting keeps smooth curves whole and splits clusters") {
    // smooth curve with steps well above the 1e-3 floor
    std::vector<double> smooth;
    for (int i = 0; i < 30; ++i) smooth.push_back(5.0 + 0.05 * i);
    auto c1 = split_branches_adaptive(points_from(smooth));
    CHECK(c1.branches.size() == 1);

    // two clusters separated by a huge jump
    std::vector<double> split;
    for (int i = 0; i < 15; ++i) split.push_back(1.0 + 0.01 * i);
    for (int i = 0; i < 15; ++i) split.push_back(50.0 + 0.01 * i);
    auto c2 = split_branches_adaptive(points_from(split));
    CHECK(c2.branches.size() == 2);

    // constant lambda stays one branch
    auto c3 = split_branches_adaptive(points_from(std::vector<double>(20, 9.87)));
    CHECK(c3.branches.size() == 1);
}

TEST_CASE("fold detection on a sampled parabola") {
    // lambda(alpha) = (alpha - 1)^2 on alpha in [0, 2]
    std::vector<CurvePoint> pts;
    for (int i = 0; i <= 20; ++i) {
        double a = 0.1 * i;
        pts.push_back({a, (a - 1.0) * (a - 1.0), {}, {}, Terminal::DirichletRoot, {}});
    }
    auto curve = split_branches(std::move(pts), 1e9);
    auto folds = detect_folds(curve);
    REQUIRE(folds.size() == 1);
    // the 3-point parabolic fit is exact for a parabola
    CHECK(folds[0].alpha == Catch::Approx(1.0).margin(1e-12));
    CHECK(folds[0].lambda == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("flat curves report no folds") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> noise(-1e-10, 1e-10);
    std::vector<CurvePoint> pts;
    for (int i = 0; i <= 20; ++i)
        pts.push_back({0.1 * i, 9.8696044 + noise(rng), {}, {}, Terminal::DirichletRoot, {}});
    auto curve = split_branches(std::move(pts), 1e9);
    CHECK(detect_folds(curve).empty());
}

TEST_CASE("short branches are skipped by fold detection") {
    auto curve = split_branches(points_from({1.0, 5.0}), 1e9);
    CHECK(detect_folds(curve).empty());
}

TEST_CASE("S-shaped data yields two folds") {
    // synthetic S: lambda rises, falls, rises again
    std::vector<CurvePoint> pts;
    for (int i = 0; i <= 60; ++i) {
        double a = 0.1 * i;
        double l = a * a * a - 9.0 * a * a + 24.0 * a;  // turns at a = 2 and a = 4
        pts.push_back({a, l, {}, {}, Terminal::DirichletRoot, {}});
    }
    auto curve = split_branches(std::move(pts), 1e9);
    auto folds = detect_folds(curve);
    REQUIRE(folds.size() == 2);
    CHECK(folds[0].alpha == Catch::Approx(2.0).margin(0.05));
    CHECK(folds[1].alpha == Catch::Approx(4.0).margin(0.05));
}
