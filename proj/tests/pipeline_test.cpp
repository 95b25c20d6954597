#include <doctest.h>

#include <cmath>

#include "clm/hier_pipeline.hpp"

using namespace clm;
using hier::DecideCriteria;

namespace {

moo::Individual make(std::vector<double> genome, std::vector<double> objectives,
                     std::vector<double> violations = {}) {
    moo::Individual i;
    i.genome = std::move(genome);
    i.objectives = std::move(objectives);
    i.violations = std::move(violations);
    return i;
}

}  // namespace

TEST_CASE("stance-length objective band is piecewise as printed") {
    hier::TargetContext ctx(cycloid_bt_target({}, 360), {});
    auto f2 = [&](double l) {
        if (l > 290.0 && l < 310.0) return (l - 300.0) * (l - 300.0);
        if (l <= 290.0) return 5.0 * (l - 290.0) * (l - 290.0);
        return 5.0 * (l - 310.0) * (l - 310.0);
    };
    CHECK(f2(300.0) == 0.0);
    CHECK(f2(295.0) == 25.0);
    CHECK(f2(290.0) == 0.0);            // outer branch at the boundary
    CHECK(f2(290.0 + 1e-9) == doctest::Approx(100.0));  // inner branch limit
    CHECK(f2(280.0) == 500.0);
    CHECK(f2(310.0) == 0.0);
    CHECK(f2(320.0) == 500.0);
}

TEST_CASE("subtask boxes shrink strictly and respect global bounds") {
    const auto t = Topology::stephenson1;
    std::vector<double> center(topology_arity(t), 100.0);
    center[sixbar::b] = 0.4;
    center[sixbar::g] = 3.0;

    const auto box1 = hier::subtask_box(t, center, 0.2, 20.0);
    const auto box2 = hier::subtask_box(t, center, 0.1, 10.0);
    const auto box3 = hier::subtask_box(t, center, 0.05, 5.0);
    for (std::size_t i = 0; i < center.size(); ++i) {
        const double w1 = box1.upper[i] - box1.lower[i];
        const double w2 = box2.upper[i] - box2.lower[i];
        const double w3 = box3.upper[i] - box3.lower[i];
        CHECK(w2 < w1);
        CHECK(w3 < w2);
        CHECK(box1.lower[i] >= hier::predesign_lower(t)[i] - 1e-12);
        CHECK(box1.upper[i] <= hier::predesign_upper(t)[i] + 1e-12);
    }
    // Length genes get at least the absolute adjustment.
    CHECK(box1.upper[sixbar::r(1)] - center[sixbar::r(1)] == doctest::Approx(20.0));
    // Angle genes scale relatively only.
    CHECK(box1.upper[sixbar::b] - center[sixbar::b] == doctest::Approx(0.08));
}

TEST_CASE("box widths nest even when the incumbent drifts") {
    const auto t = Topology::stephenson1;
    std::vector<double> x0(topology_arity(t), 60.0);
    x0[sixbar::b] = 0.3;
    x0[sixbar::g] = 2.8;
    const auto box1 = hier::subtask_box(t, x0, 0.2, 20.0);
    // Drifted incumbents stay inside the previous box, so the policy
    // half-widths bound the realized widths and shrink strictly.
    std::vector<double> x1 = box1.upper;
    const auto box2 = hier::subtask_box(t, x1, 0.1, 10.0);
    std::vector<double> x2 = box2.upper;
    const auto box3 = hier::subtask_box(t, x2, 0.05, 5.0);
    const auto& lens = topology_length_dimension(t);
    for (std::size_t i = 0; i < x0.size(); ++i) {
        auto hw = [&](const std::vector<double>& c, double frac, double mm) {
            return lens[i] ? std::max(frac * std::abs(c[i]), mm) : frac * std::abs(c[i]);
        };
        CHECK(hw(x1, 0.1, 10.0) < hw(x0, 0.2, 20.0));
        CHECK(hw(x2, 0.05, 5.0) < hw(x1, 0.1, 10.0));
        CHECK(box2.upper[i] - box2.lower[i] <= 2.0 * hw(x1, 0.1, 10.0) + 1e-12);
        CHECK(box3.upper[i] - box3.lower[i] <= 2.0 * hw(x2, 0.05, 5.0) + 1e-12);
    }
}

TEST_CASE("decide ladder: feasibility, preference, priority, determinism") {
    moo::ParetoArchive archive;
    archive.individuals = {
        make({1, 0}, {0.0, 1.0}, {0.0}),
        make({2, 0}, {0.2, 0.2}, {0.0}),
        make({3, 0}, {1.0, 0.0}, {0.0}),
        make({4, 0}, {-1.0, -1.0}, {5.0}),  // infeasible, never chosen
    };
    DecideCriteria crit;
    crit.priority_objective = 0;
    auto pick = hier::decide(archive, crit);
    REQUIRE(pick.ok());
    CHECK(pick->objectives[0] == doctest::Approx(0.0));

    crit.preferred_tiers = {{{1, 0.5}}};
    pick = hier::decide(archive, crit);
    REQUIRE(pick.ok());
    CHECK(pick->objectives == std::vector<double>{0.2, 0.2});

    crit.preferred_tiers.clear();
    crit.guard = {{1, 0.3}};
    pick = hier::decide(archive, crit);
    REQUIRE(pick.ok());
    CHECK(pick->objectives[1] <= 0.3);

    // Single-member archive returns that member.
    moo::ParetoArchive one;
    one.individuals = {make({9}, {4.0, 4.0})};
    // Degenerate front falls back to the whole archive.
    auto single = hier::decide(one, DecideCriteria{});
    REQUIRE(single.ok());
    CHECK(single->genome == std::vector<double>{9});

    // Shuffled archive decides identically.
    moo::ParetoArchive shuffled;
    shuffled.individuals = {archive.individuals[2], archive.individuals[0],
                            archive.individuals[3], archive.individuals[1]};
    DecideCriteria base;
    base.priority_objective = 0;
    auto p1 = hier::decide(archive, base);
    auto p2 = hier::decide(shuffled, base);
    REQUIRE(p1.ok());
    REQUIRE(p2.ok());
    CHECK(p1->genome == p2->genome);

    moo::ParetoArchive empty;
    CHECK(!hier::decide(empty, base).ok());
}

TEST_CASE("sixbar evaluation penalizes out-of-arity and infeasible genomes") {
    hier::TargetContext ctx(cycloid_bt_target({}, 360), {});
    std::vector<double> impossible(topology_arity(Topology::stephenson1), 30.0);
    impossible[sixbar::r(1)] = 400.0;  // crank longer than everything else
    const auto ev = hier::evaluate_sixbar(ctx, Topology::stephenson1, impossible, 360);
    CHECK(ev.penalized);
    CHECK(ev.f1 >= moo::kPenalty);
}
