#pragma once

#include "clm/fallible.hpp"
#include "clm/trajectory_types.hpp"

namespace clm {

/// Compound-cycloid swing curve: step length L, step height H, period T.
/// The analytic form puts the swing below the stance line (y <= 0).
struct CycloidSpec {
    double L = 300.0;  // mm
    double H = 100.0;  // mm
    double T = 2.0;    // s
};

/// x(t) = L (t/T - sin(2 pi t/T)/(2 pi)),  y(t) = -H (1 - cos(2 pi t/T))/2.
Fallible<Vec2> cycloid_point(const CycloidSpec& spec, double t);

/// Analytic derivative of cycloid_point; zero at both endpoints.
Vec2 cycloid_velocity(const CycloidSpec& spec, double t);

/// Closed BT target: n/2 stance samples on the straight segment y = 0 from
/// (0,0) to (L,0), then n/2 swing samples tracing the cycloid arc back from
/// (L,0) to (0,0). Landing (t1) falls at x = 0. `flip_y` mirrors the curve
/// about the stance line for presentation.
Trajectory cycloid_bt_target(const CycloidSpec& spec, int n, bool flip_y = false);

}  // namespace clm
