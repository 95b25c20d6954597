#pragma once

#include <optional>
#include <vector>

#include "clm/geometry.hpp"

namespace clm {

/// Uniformly sampled periodic planar curve. `closed` marks wrap-around
/// continuity (a BT); walking trajectories are open.
struct Trajectory {
    std::vector<Vec2> points;
    double period_T = 0.0;   // s
    int phase_origin = 0;    // sample index of the nominal time origin
    bool closed = true;

    std::size_t size() const { return points.size(); }
    const Vec2& at_wrapped(long i) const {
        const long n = static_cast<long>(points.size());
        long k = i % n;
        if (k < 0) k += n;
        return points[static_cast<std::size_t>(k)];
    }
    double dt() const { return period_T / static_cast<double>(points.size()); }
};

struct Feature {
    int index = 0;
    Vec2 point;
};

/// The eight BT feature points. t1/t2 are the landing/take-off pair (equal y,
/// half a period apart, x(t1) < x(t2)); t3..t5 are global extrema; t6..t8 are
/// swing-local extrema and may be absent.
struct FeaturePoints {
    Feature t1, t2, t3, t4, t5;
    std::optional<Feature> t6, t7, t8;
};

}  // namespace clm
