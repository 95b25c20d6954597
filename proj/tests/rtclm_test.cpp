#include <doctest.h>

#include <cmath>
#include <numbers>

#include "clm/rtclm.hpp"

using namespace clm;

namespace {

/// A coupling-feasible demonstration vector found by seeded search; the
/// appendix rows are exercised separately as the convention experiment.
std::vector<double> demo_design() {
    return {66.41, 236.31, 234.39, 244.15, 221.41, 59.34, 27.97,
            122.46, 208.14, 212.67, 286.98, 130.72, 105.01};
}

}  // namespace

TEST_CASE("coupling solve satisfies its own equations") {
    ParamVector pv;
    pv.topology = Topology::rtclm_seven_bar;
    pv.values = demo_design();

    rtclm::Targets targets{50.0, 220.0};
    const auto ev = rtclm::evaluate_design(pv.values, targets);
    REQUIRE(!ev.penalized);
    REQUIRE(ev.design.has_value());
    const auto& d = *ev.design;
    CHECK(d.coupling_residual < 1e-9);

    // Substitution oracle: rebuild F from the solved unknowns and check the
    // congruences directly.
    const auto& v = d.params.values;
    const Vec2 D{v[rtclm::idx::xd], v[rtclm::idx::yd]};
    auto pose_l = rtclm::mode_kinematics(d, rtclm::Mode::primary, d.phi_A);
    auto pose_r = rtclm::mode_kinematics(d, rtclm::Mode::primary, d.phi_A + std::numbers::pi);
    REQUIRE(pose_l.ok());
    REQUIRE(pose_r.ok());
    const Vec2 El = pose_l->joints[4], Er = pose_r->joints[4];
    const Vec2 Cl = pose_l->joints[2], Cr = pose_r->joints[2];
    const Vec2 Hl = El + Vec2{v[rtclm::idx::dx_eh], d.dy_EH};
    const Vec2 Hr = Er + Vec2{v[rtclm::idx::dx_eh], d.dy_EH};
    const Vec2 Fl = Hl + polar(v[rtclm::idx::r6], d.phi_H_l);
    const Vec2 Fr = Hr + polar(v[rtclm::idx::r6], d.phi_H_r);
    CHECK(std::abs(dist(Fl, D) - dist(Fr, D)) < 1e-9);
    CHECK(std::abs(dist(Fl, Cl) - dist(Fr, Cr)) < 1e-9);
    CHECK(std::abs(d.phi_H_r - d.phi_H_l - std::numbers::pi) < 1e-12);

    // y_E equality at the switch pair.
    CHECK(std::abs(El.y - Er.y) < 1e-7);
    // The primary pose carries F at the congruent mount.
    CHECK(dist(pose_l->joints[6], Fl) < 1e-9);
}

TEST_CASE("switching state poses coincide between modes") {
    const auto ev = rtclm::evaluate_design(demo_design(), {50.0, 220.0});
    REQUIRE(!ev.penalized);
    const auto& d = *ev.design;
    auto primary = rtclm::mode_kinematics(d, rtclm::Mode::primary, d.phi_A);
    auto aux = rtclm::mode_kinematics(d, rtclm::Mode::auxiliary, d.phi_H_l);
    REQUIRE(primary.ok());
    REQUIRE(aux.ok());
    for (std::size_t j = 0; j < primary->joints.size(); ++j)
        CHECK(dist(primary->joints[j], aux->joints[j]) < 1e-9);
    CHECK(dist(primary->foot, aux->foot) < 1e-9);
}

TEST_CASE("mirrored design solves with mirrored coupling") {
    auto x = demo_design();
    const auto base = rtclm::evaluate_design(x, {50.0, 220.0});
    REQUIRE(!base.penalized);
    // Negate x-type parameters: x_d and dx_EH.
    auto mirrored = x;
    mirrored[rtclm::idx::xd] = -mirrored[rtclm::idx::xd];
    mirrored[rtclm::idx::dx_eh] = -mirrored[rtclm::idx::dx_eh];
    const auto mir = rtclm::evaluate_design(mirrored, {50.0, 220.0});
    if (mir.penalized) return;
    CHECK(mir.design->coupling_residual < 1e-9);
}

TEST_CASE("crank defect conditions cover both loops") {
    const auto ev = rtclm::evaluate_design(demo_design(), {50.0, 220.0});
    REQUIRE(!ev.penalized);
    const auto rep = rtclm::crank_defects(*ev.design);
    CHECK(!rep.has_crank_defect);
    // Loop-1 violation is the reported inequality gap.
    CHECK(ev.violations[0] < 0.0);
    CHECK(ev.violations[1] < 0.0);
}

TEST_CASE("evaluation reports thetas and their violations consistently") {
    const auto ev = rtclm::evaluate_design(demo_design(), {50.0, 220.0});
    REQUIRE(!ev.penalized);
    CHECK(ev.violations[3] == doctest::Approx(15.0 - ev.theta1));
    CHECK(ev.violations[4] == doctest::Approx(15.0 - ev.theta2));
    CHECK(ev.violations[5] == doctest::Approx(ev.h_m_aux / 4.0 - ev.h_bar));
    CHECK(ev.violations[6] == doctest::Approx(20.0 - ev.psi2));
    CHECK(ev.f1 == doctest::Approx((ev.h4 - 220.0) * (ev.h4 - 220.0)));
    CHECK(ev.f2 == doctest::Approx((ev.h6 - 50.0) * (ev.h6 - 50.0)));
}

TEST_CASE("bounds are the published search ranges") {
    const auto& lb = rtclm::lower_bounds();
    const auto& ub = rtclm::upper_bounds();
    REQUIRE(lb.size() == 13);
    REQUIRE(ub.size() == 13);
    CHECK(lb[rtclm::idx::r1] == 30.0);
    CHECK(ub[rtclm::idx::r1] == 100.0);
    CHECK(lb[rtclm::idx::xd] == -150.0);
    CHECK(ub[rtclm::idx::a1] == 350.0);
    CHECK(lb[rtclm::idx::dx_eh] == 100.0);
    CHECK(ub[rtclm::idx::dx_eh] == 300.0);
}
