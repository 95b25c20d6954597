#include <doctest.h>

#include <cmath>

#include "clm/metrics.hpp"
#include "clm/target_curves.hpp"

using namespace clm;

TEST_CASE("cycloid point evaluations") {
    const CycloidSpec spec{300.0, 100.0, 2.0};
    auto p0 = cycloid_point(spec, 0.0);
    REQUIRE(p0.ok());
    CHECK(p0->x == doctest::Approx(0.0));
    CHECK(p0->y == doctest::Approx(0.0));

    auto mid = cycloid_point(spec, 1.0);
    REQUIRE(mid.ok());
    CHECK(mid->x == doctest::Approx(150.0).epsilon(1e-12));
    CHECK(mid->y == doctest::Approx(-100.0).epsilon(1e-12));

    auto end = cycloid_point(spec, 2.0);
    REQUIRE(end.ok());
    CHECK(end->x == doctest::Approx(300.0).epsilon(1e-12));
    CHECK(std::abs(end->y) < 1e-12);

    CHECK(!cycloid_point(spec, -0.1).ok());
    CHECK(!cycloid_point(spec, 2.1).ok());

    CHECK(norm(cycloid_velocity(spec, 0.0)) < 1e-12);
    CHECK(norm(cycloid_velocity(spec, 2.0)) < 1e-10);
}

TEST_CASE("target trajectory metrics") {
    const CycloidSpec spec;
    const auto bt = cycloid_bt_target(spec, 3600);
    auto fp = find_feature_points(bt);
    REQUIRE(fp.ok());
    auto sm = stance_metrics(bt, *fp);
    REQUIRE(sm.ok());
    CHECK(sm->h_s == doctest::Approx(0.0));
    CHECK(sm->S == doctest::Approx(0.0));
    CHECK(sm->l_s == doctest::Approx(spec.L).epsilon(1e-12));
    CHECK(impact(bt, *fp).I < 1.0);

    // Swing extremum at -H, mirror-symmetric about L/2.
    double ymin = 0.0;
    for (const auto& p : bt.points) ymin = std::min(ymin, p.y);
    CHECK(ymin == doctest::Approx(-spec.H).epsilon(1e-9));

    const auto flipped = cycloid_bt_target(spec, 3600, true);
    double ymax = 0.0;
    for (const auto& p : flipped.points) ymax = std::max(ymax, p.y);
    CHECK(ymax == doctest::Approx(spec.H).epsilon(1e-9));
}
