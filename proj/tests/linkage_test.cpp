#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "clm/linkage.hpp"

using namespace clm;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

ParamVector grashof_four_bar() {
    ParamVector p;
    p.topology = Topology::four_bar;
    //            b    g    xa   ya   r1  r2  r3  r4  r5   r6
    p.values = {0.2, 0.1, 5.0, -3.0, 20, 80, 70, 60, 35, -10};
    return p;
}

}  // namespace

TEST_CASE("dyad solver matches analytic circle intersection") {
    auto q = solve_dyad_rrr({0, 0}, {10, 0}, 6, 6, +1);
    REQUIRE(q.ok());
    CHECK(q->x == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(q->y == doctest::Approx(std::sqrt(11.0)).epsilon(1e-12));

    auto qm = solve_dyad_rrr({0, 0}, {10, 0}, 6, 6, -1);
    REQUIRE(qm.ok());
    CHECK(qm->y == doctest::Approx(-std::sqrt(11.0)).epsilon(1e-12));

    auto tangent = solve_dyad_rrr({0, 0}, {10, 0}, 5, 5, +1);
    REQUIRE(tangent.ok());
    CHECK(tangent->x == doctest::Approx(5.0));
    CHECK(std::abs(tangent->y) < 1e-6);

    auto disjoint = solve_dyad_rrr({0, 0}, {10, 0}, 2, 2, +1);
    REQUIRE(!disjoint.ok());
    CHECK(disjoint.fault().kind == FaultKind::loop_defect);

    auto degenerate = solve_dyad_rrr({1, 1}, {1, 1}, 2, 2, +1);
    REQUIRE(!degenerate.ok());
    CHECK(degenerate.fault().kind == FaultKind::degenerate_dyad);
}

TEST_CASE("dyad solver against 10^4 randomized constructed solutions") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int k = 0; k < 10000; ++k) {
        const Vec2 p1{u(rng), u(rng)}, p2{u(rng), u(rng)}, q{u(rng), u(rng)};
        if (dist(p1, p2) < 1e-3) continue;
        const double l1 = dist(q, p1), l2 = dist(q, p2);
        if (l1 < 1e-3 || l2 < 1e-3) continue;
        const int branch = cross(p2 - p1, q - p1) >= 0 ? +1 : -1;
        auto sol = solve_dyad_rrr(p1, p2, l1, l2, branch);
        REQUIRE(sol.ok());
        CHECK(dist(*sol, q) < 1e-10 * std::max(1.0, norm(q)));
    }
}

TEST_CASE("link_point offsets are orthogonal and signed") {
    const Vec2 e = link_point({0, 0}, {10, 0}, 3, -2);
    CHECK(e.x == doctest::Approx(3.0));
    CHECK(e.y == doctest::Approx(-2.0));
}

TEST_CASE("crank condition arithmetic") {
    // r1=100 against 50,50,50: 100 + 100 > 150 -> defect.
    CHECK(!crank_condition_holds(100, 50, 50, 50));
    // Appendix-style loop: d = hypot(90.91, 98.72).
    const double d = std::hypot(90.91, 98.72);
    CHECK(d == doctest::Approx(134.2).epsilon(1e-3));
    CHECK(crank_condition_holds(40.15, 106.06, 75.76, d));
}

TEST_CASE("four-bar forward kinematics is periodic and closes loops") {
    const auto p = grashof_four_bar();
    auto a = forward_kinematics(p, 0.0);
    auto b = forward_kinematics(p, kTau);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(dist(a->foot, b->foot) < 1e-9);
    for (std::size_t j = 0; j < a->joints.size(); ++j)
        CHECK(dist(a->joints[j], b->joints[j]) < 1e-9);

    for (int k = 0; k < 360; ++k) {
        auto pose = forward_kinematics(p, kTau * k / 360.0);
        REQUIRE(pose.ok());
        for (double r : closure_residuals(p, *pose)) CHECK(r < 1e-9);
    }
}

TEST_CASE("similarity scaling scales joint coordinates about the fixed pivot") {
    const auto p = grashof_four_bar();
    ParamVector scaled = p;
    const auto& lens = topology_length_dimension(p.topology);
    for (std::size_t i = 0; i < scaled.values.size(); ++i)
        if (lens[i]) scaled.values[i] *= 2.0;

    for (int k = 0; k < 36; ++k) {
        const double theta = kTau * k / 36.0;
        auto a = forward_kinematics(p, theta);
        auto b = forward_kinematics(scaled, theta);
        REQUIRE(a.ok());
        REQUIRE(b.ok());
        const Vec2 pivot_a = a->joints[0], pivot_b = b->joints[0];
        CHECK(dist(b->foot - pivot_b, (a->foot - pivot_a) * 2.0) < 1e-9);
        for (std::size_t j = 0; j < a->joints.size(); ++j)
            CHECK(dist(b->joints[j] - pivot_b, (a->joints[j] - pivot_a) * 2.0) < 1e-9);
    }
}

TEST_CASE("trace is closed, translates rigidly, and reverses cleanly") {
    const auto p = grashof_four_bar();
    auto t = trace_bt(p, 360);
    REQUIRE(t.ok());
    CHECK(dist(t->points.front(), t->points.back()) <
          1.5 * dist(t->points[0], t->points[1]) + 1e-9);

    ParamVector shifted = grashof_four_bar();
    shifted.values[sixbar::xa] += 11.0;
    shifted.values[sixbar::ya] -= 7.0;
    auto ts = trace_bt(shifted, 360);
    REQUIRE(ts.ok());
    for (std::size_t i = 0; i < t->size(); ++i)
        CHECK(dist(ts->points[i], t->points[i] + Vec2{11.0, -7.0}) < 1e-9);

    auto tr = trace_bt(p, 360, {}, {0.5, -1});
    REQUIRE(tr.ok());
    for (std::size_t i = 0; i < t->size(); ++i) {
        const std::size_t j = (t->size() - i) % t->size();
        CHECK(dist(tr->points[i], t->points[j]) < 1e-9);
    }
}

TEST_CASE("crank defect verdict implies a clean first-loop sweep") {
    const auto p = grashof_four_bar();
    const auto rep = check_crank_defect(p);
    CHECK(!rep.has_crank_defect);
    for (int k = 0; k < 3600; ++k) {
        auto pose = forward_kinematics(p, kTau * k / 3600.0);
        CHECK(pose.ok());
    }

    ParamVector bad = p;
    bad.values[sixbar::r(1)] = 100.0;
    bad.values[sixbar::r(2)] = 50.0;
    bad.values[sixbar::r(3)] = 50.0;
    bad.values[sixbar::r(4)] = 50.0;
    CHECK(check_crank_defect(bad).has_crank_defect);
}

TEST_CASE("param vector invariants") {
    ParamVector p = grashof_four_bar();
    CHECK(!p.invalid_reason());
    p.values[sixbar::r(1)] = -5.0;
    CHECK(p.invalid_reason());
    p = grashof_four_bar();
    p.values.pop_back();
    CHECK(p.invalid_reason());
    // Signed coupler offsets may be negative.
    p = grashof_four_bar();
    p.values[sixbar::r(6)] = -120.0;
    CHECK(!p.invalid_reason());
}
