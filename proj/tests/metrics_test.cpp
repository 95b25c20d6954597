#include <doctest.h>

#include <cmath>
#include <numbers>

#include "clm/metrics.hpp"
#include "clm/target_curves.hpp"

using namespace clm;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

Trajectory circle(double radius, int n, double period = 1.0, Vec2 center = {0, 0}) {
    Trajectory t;
    t.period_T = period;
    for (int k = 0; k < n; ++k) t.points.push_back(center + polar(radius, kTau * k / n));
    return t;
}

/// Semicircular arch of height H sampled uniformly in x over [0, 2H].
Trajectory semicircle_arch(double H, int n, double period = 2.0) {
    Trajectory t;
    t.period_T = period;
    t.closed = false;
    for (int k = 0; k < n; ++k) {
        const double x = 2.0 * H * k / (n - 1);
        const double h2 = H * H - (x - H) * (x - H);
        t.points.push_back({x, std::sqrt(std::max(0.0, h2))});
    }
    return t;
}

MultiWt stacked_arches(double H, double stride, int legs_n = 4) {
    MultiWt mw;
    mw.stride = stride;
    for (int k = 0; k < legs_n; ++k) mw.positioned.push_back(semicircle_arch(H, 721));
    return mw;
}

}  // namespace

TEST_CASE("stance metrics reproduce the straightness arithmetic") {
    // S = 100 * 12.5 / 300.
    const auto bt = cycloid_bt_target({}, 360);
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    auto sm = stance_metrics(bt, *fp);
    REQUIRE(sm.ok());
    CHECK(sm->h_s == doctest::Approx(0.0));
    CHECK(sm->S == doctest::Approx(0.0));
    CHECK(sm->l_s == doctest::Approx(300.0));
    CHECK(100.0 * 12.5 / 300.0 == doctest::Approx(4.17).epsilon(1e-3));
}

TEST_CASE("stance metrics scale linearly, straightness stays put") {
    auto bt = cycloid_bt_target({}, 360);
    // Tilt the stance slightly so h_s is nonzero.
    for (auto& p : bt.points)
        if (p.y == 0.0) p.y = -0.01 * p.x * (300.0 - p.x) / 300.0;
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    auto sm = stance_metrics(bt, *fp);
    REQUIRE(sm.ok());
    CHECK(sm->h_s > 0.0);

    const auto bt2 = scale(bt, 3.0);
    auto fp2 = find_feature_points(bt2);
    REQUIRE(fp2.ok());
    auto sm2 = stance_metrics(bt2, *fp2);
    REQUIRE(sm2.ok());
    CHECK(sm2->h_s == doctest::Approx(3.0 * sm->h_s).epsilon(1e-9));
    CHECK(sm2->S == doctest::Approx(sm->S).epsilon(1e-9));
}

TEST_CASE("impact uses the central-difference velocity at the landing feature") {
    const double R = 50.0, T = 2.0;
    const auto bt = circle(R, 3600, T);
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    // The pair lands on the horizontal diameter where the tangent is vertical.
    auto im = impact(bt, *fp);
    CHECK(im.theta1 == doctest::Approx(90.0).epsilon(1e-4));
    CHECK(im.I == doctest::Approx(kTau * R / T).epsilon(1e-4));

    // Landing at a 45-degree point: supply the feature directly.
    FeaturePoints fp45 = *fp;
    fp45.t1 = {450, bt.points[450]};  // 45 degrees up the circle
    auto im45 = impact(bt, fp45);
    CHECK(im45.theta1 == doctest::Approx(45.0).epsilon(1e-6));
    CHECK(im45.I ==
          doctest::Approx(kTau * R / T * std::sin(std::numbers::pi / 4)).epsilon(1e-4));
}

TEST_CASE("impact estimate converges at second order") {
    const double R = 50.0, T = 2.0;
    auto coarse = circle(R, 360, T);
    auto fine = circle(R, 720, T);
    auto fc = find_feature_points(coarse);
    auto ff = find_feature_points(fine);
    REQUIRE(fc.ok());
    REQUIRE(ff.ok());
    const double exact = kTau * R / T;
    const double ec = std::abs(impact(coarse, *fc).I - exact);
    const double ef = std::abs(impact(fine, *ff).I - exact);
    CHECK(ef < ec / 3.0);  // O(1/N^2) halving gives ~4x
}

TEST_CASE("cycloid target lands softly") {
    const auto bt = cycloid_bt_target({}, 3600);
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    const auto im = impact(bt, *fp);
    CHECK(im.I < 1.0);  // mm/s, analytic zero; grid noise only
}

TEST_CASE("crossing stats of the semicircular arch") {
    const double H = 120.0;
    const auto wt = semicircle_arch(H, 3600);
    const auto cs = crossing_stats(wt);
    CHECK(cs.h_m == doctest::Approx(H).epsilon(1e-6));
    CHECK(cs.h_bar == doctest::Approx(std::numbers::pi / 4.0 * H).epsilon(1e-4));

    Trajectory flat;
    flat.period_T = 2.0;
    flat.closed = false;
    for (int k = 0; k < 100; ++k) flat.points.push_back({static_cast<double>(k), 0.0});
    const auto cz = crossing_stats(flat);
    CHECK(cz.h_m == doctest::Approx(0.0));
    CHECK(cz.h_bar == doctest::Approx(0.0));
}

TEST_CASE("crossing probability degenerate and blocked obstacles") {
    const double H = 120.0;
    auto mw = stacked_arches(H, 600.0);
    const auto free_pass = crossing_probability(mw, 0.0, 0.0, Gait::quad);
    CHECK(free_pass.psi2 == doctest::Approx(100.0).epsilon(1e-6));
    const auto blocked = crossing_probability(mw, 10.0, H + 1.0, Gait::quad);
    CHECK(blocked.insufficient);
    CHECK(blocked.psi2 == doctest::Approx(0.0));
}

TEST_CASE("crossing probability is monotone in obstacle size") {
    // Four distinct arches across the stride, the regime the gap formula
    // describes.
    MultiWt mw;
    mw.stride = 640.0;
    for (int k = 0; k < 4; ++k) {
        auto arch = semicircle_arch(70.0, 721);
        for (auto& p : arch.points) p.x += 160.0 * k;
        mw.positioned.push_back(arch);
    }
    double prev = 1e9;
    for (double a : {0.0, 10.0, 25.0, 50.0}) {
        const auto cp = crossing_probability(mw, a, 25.0, Gait::quad);
        CHECK(cp.psi2 <= prev + 1e-12);
        prev = cp.psi2;
    }
    prev = 1e9;
    bool strict_drop = false;
    for (double b : {0.0, 10.0, 25.0, 60.0, 100.0}) {
        const auto cp = crossing_probability(mw, 25.0, b, Gait::quad);
        CHECK(cp.psi2 <= prev + 1e-12);
        if (cp.psi2 < prev - 1e-9 && prev < 1e8) strict_drop = true;
        prev = cp.psi2;
    }
    CHECK(strict_drop);
}

TEST_CASE("mse identities") {
    const auto target = cycloid_bt_target({}, 360);
    CHECK(*mse(target, target) == doctest::Approx(0.0));
    const auto shifted = translate(target, {3.0, 4.0});
    CHECK(*mse(shifted, target) == doctest::Approx(5.0).epsilon(1e-12));
    Trajectory shorter = target;
    shorter.points.resize(300);
    auto bad = mse(shorter, target);
    CHECK(!bad.ok());
    CHECK(bad.fault().kind == FaultKind::length_mismatch);
}

TEST_CASE("fourier descriptor invariances") {
    const auto c1 = circle(1.0, 256);
    Trajectory c2 = circle(2.5, 256, 1.0, {40.0, -12.0});
    for (auto& p : c2.points) p = Vec2{40.0, -12.0} + rotate(p - Vec2{40.0, -12.0}, 0.83);
    CHECK(fourier_distance(c1, c2) < 1e-9);

    Trajectory square;
    square.period_T = 1.0;
    for (int k = 0; k < 256; ++k) {
        const double s = 4.0 * k / 256.0;
        if (s < 1.0) square.points.push_back({s, 0.0});
        else if (s < 2.0) square.points.push_back({1.0, s - 1.0});
        else if (s < 3.0) square.points.push_back({3.0 - s, 1.0});
        else square.points.push_back({0.0, 4.0 - s});
    }
    CHECK(fourier_distance(c1, square) > 0.05);

    const auto target = cycloid_bt_target({}, 360);
    for (int shift : {1, 17, 180, 359}) {
        const auto rotated = rotate_start(target, shift);
        CHECK(fourier_distance(rotated, target) < 1e-9);
    }
    CHECK(fourier_distance(scale(target, 4.0), target) < 1e-9);
}
