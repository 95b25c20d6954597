#include "clm/target_curves.hpp"

#include <cmath>
#include <numbers>

namespace clm {

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;
}

Fallible<Vec2> cycloid_point(const CycloidSpec& spec, double t) {
    if (t < 0.0 || t > spec.T) return Fault{FaultKind::out_of_range, t};
    const double ph = kTau * t / spec.T;
    return Vec2{spec.L * (t / spec.T - std::sin(ph) / kTau),
                -spec.H * 0.5 * (1.0 - std::cos(ph))};
}

Vec2 cycloid_velocity(const CycloidSpec& spec, double t) {
    const double ph = kTau * t / spec.T;
    return {spec.L / spec.T * (1.0 - std::cos(ph)),
            -spec.H * std::numbers::pi / spec.T * std::sin(ph)};
}

Trajectory cycloid_bt_target(const CycloidSpec& spec, int n, bool flip_y) {
    Trajectory bt;
    bt.period_T = spec.T;
    bt.closed = true;
    bt.points.reserve(static_cast<std::size_t>(n));
    const int half = n / 2;
    // Stance: landing at (0,0), take-off at (L,0), constant speed.
    for (int k = 0; k < half; ++k) {
        bt.points.push_back({spec.L * k / half, 0.0});
    }
    // Swing: the cycloid arc traversed from (L,0) back to (0,0). The arc's
    // own parameter runs over the full [0,T] of the analytic form.
    for (int k = 0; k < half; ++k) {
        const double s = spec.T * (1.0 - static_cast<double>(k) / half);
        bt.points.push_back(*cycloid_point(spec, s));
    }
    if (flip_y)
        for (auto& p : bt.points) p.y = -p.y;
    return bt;
}

}  // namespace clm
