#include <doctest.h>

#include <cmath>
#include <numbers>

#include "clm/target_curves.hpp"
#include "clm/trajectory.hpp"

using namespace clm;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

Trajectory unit_circle(int n, double period = 1.0) {
    Trajectory t;
    t.period_T = period;
    for (int k = 0; k < n; ++k) t.points.push_back(polar(1.0, kTau * k / n));
    return t;
}

}  // namespace

TEST_CASE("feature points of the unit circle") {
    const auto bt = unit_circle(360);
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    CHECK(fp->t3.index == 270);
    CHECK(fp->t4.index == 180);
    CHECK(fp->t5.index == 0);
    CHECK(fp->t1.index == 180);
    CHECK(fp->t2.index == 0);
    CHECK(fp->t1.point.x < fp->t2.point.x);
}

TEST_CASE("feature points of the cycloid target") {
    const CycloidSpec spec;
    const auto bt = cycloid_bt_target(spec, 360);
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    CHECK(std::abs(fp->t1.point.x) < 1e-9);           // landing at x = 0
    CHECK(fp->t1.point.y == doctest::Approx(0.0));
    CHECK(fp->t2.point.x == doctest::Approx(spec.L));
    CHECK(fp->t3.point.y == doctest::Approx(-spec.H).epsilon(1e-6));
    // Mirror in x swaps the extreme labels and the pair roles.
    Trajectory mirrored = bt;
    for (auto& p : mirrored.points) p.x = -p.x;
    auto fm = find_feature_points(mirrored);
    REQUIRE(fm.ok());
    CHECK(fm->t4.index == fp->t5.index);
    CHECK(fm->t5.index == fp->t4.index);
    CHECK(fm->t1.index == fp->t2.index);
    CHECK(fm->t2.index == fp->t1.index);
}

TEST_CASE("feature detection is stable under refinement") {
    const auto coarse = cycloid_bt_target({}, 360);
    const auto fine = cycloid_bt_target({}, 720);
    auto fc = find_feature_points(coarse);
    auto ff = find_feature_points(fine);
    REQUIRE(fc.ok());
    REQUIRE(ff.ok());
    CHECK(std::abs(ff->t1.index - 2 * fc->t1.index) <= 2);
    CHECK(std::abs(ff->t3.index - 2 * fc->t3.index) <= 2);
}

TEST_CASE("walking trajectory endpoints satisfy the doubling identities") {
    const auto bt = cycloid_bt_target({}, 360);
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    auto wt = bt_to_wt(bt, *fp);
    REQUIRE(wt.ok());
    CHECK(wt->size() == 181);
    // Starts exactly at the take-off point.
    CHECK(dist(wt->points.front(), fp->t2.point) < 1e-12);
    // Re-based about C_b(t2): C_m(end) = 2 C~_b(t1).
    const Vec2 end_rebased = wt->points.back() - fp->t2.point;
    const Vec2 t1_rebased = fp->t1.point - fp->t2.point;
    CHECK(dist(end_rebased, t1_rebased * 2.0) < 1e-9);
    // Step length is twice the stance length.
    const double ls = std::abs(fp->t2.point.x - fp->t1.point.x);
    CHECK(std::abs(wt->points.back().x - wt->points.front().x) ==
          doctest::Approx(2.0 * ls).epsilon(1e-12));
    // Horizontal stance gives a one-signed height profile, zero at the ends.
    const auto flipped = cycloid_bt_target({}, 360, true);
    auto fpf = find_feature_points(flipped);
    REQUIRE(fpf.ok());
    auto wtf = bt_to_wt(flipped, *fpf);
    REQUIRE(wtf.ok());
    const double y0 = wtf->points.front().y;
    for (const auto& p : wtf->points) CHECK(p.y >= y0 - 1e-9);
    CHECK(std::abs(wtf->points.back().y - y0) < 1e-9);
}

TEST_CASE("walking trajectory is translation equivariant") {
    const auto bt = cycloid_bt_target({}, 360);
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    auto wt = bt_to_wt(bt, *fp);

    const Vec2 d{17.0, -4.0};
    const auto bt2 = translate(bt, d);
    auto fp2 = find_feature_points(bt2);
    REQUIRE(fp2.ok());
    auto wt2 = bt_to_wt(bt2, *fp2);
    REQUIRE(wt2.ok());
    for (std::size_t i = 0; i < wt->size(); ++i)
        CHECK(dist(wt2->points[i], wt->points[i] + d) < 1e-9);

    auto mw = multi_wt_layout(bt, *fp, LegLayout::coincident_quad());
    auto mw2 = multi_wt_layout(bt2, *fp2, LegLayout::coincident_quad());
    REQUIRE(mw.ok());
    REQUIRE(mw2.ok());
    CHECK(mw->dx_ab == doctest::Approx(mw2->dx_ab).epsilon(1e-12));
    CHECK(mw->dx_bc == doctest::Approx(mw2->dx_bc).epsilon(1e-12));
    CHECK(mw->dx_cd == doctest::Approx(mw2->dx_cd).epsilon(1e-12));
}

TEST_CASE("layout offsets are linear in the origins") {
    const auto bt = cycloid_bt_target({}, 360);
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    auto base = multi_wt_layout(bt, *fp, LegLayout::coincident_quad());
    REQUIRE(base.ok());

    LegLayout shifted = LegLayout::coincident_quad();
    shifted.legs[1].origin = {25.0, 0.0};
    auto moved = multi_wt_layout(bt, *fp, shifted);
    REQUIRE(moved.ok());
    CHECK(moved->dx_ab == doctest::Approx(base->dx_ab + 25.0));
    CHECK(moved->dx_bc == doctest::Approx(base->dx_bc - 25.0));
    CHECK(moved->dx_cd == doctest::Approx(base->dx_cd));

    // Same-phase diagonal legs are interchangeable.
    LegLayout swapped = LegLayout::coincident_quad();
    std::swap(swapped.legs[0], swapped.legs[2]);
    auto sw = multi_wt_layout(bt, *fp, swapped);
    REQUIRE(sw.ok());
    for (std::size_t leg = 0; leg < 4; ++leg)
        for (std::size_t i = 0; i < sw->positioned[leg].size(); ++i)
            CHECK(dist(sw->positioned[leg].points[i], base->positioned[leg].points[i]) < 1e-12);
}

TEST_CASE("degenerate trajectories report NoValidPair") {
    Trajectory t;
    t.period_T = 1.0;
    for (int k = 0; k < 64; ++k) t.points.push_back({0.0, static_cast<double>(k % 2)});
    auto fp = find_feature_points(t);
    CHECK(!fp.ok());
    CHECK(fp.fault().kind == FaultKind::no_valid_pair);
}
