#pragma once

#include <array>
#include <string>
#include <vector>

#include "clm/fallible.hpp"
#include "clm/trajectory_types.hpp"

namespace clm {

/// Landing/take-off pair plus the extremal feature points of a closed BT.
/// The (t1, t2) pair minimizes |y(i) - y(i + N/2)| subject to
/// x(i) < x(i + N/2), with t1 the smaller-x member. The stance arc runs
/// t1 -> t2 forward in sample order; the swing arc t2 -> t1.
Fallible<FeaturePoints> find_feature_points(const Trajectory& bt);

/// Walking trajectory of one leg from its BT under no-slip foot-ground
/// contact: C_m(dt) = C_b(t2+dt) - C_b(t1+dt) + C_b(t1) for dt in [0, T/2].
/// The result starts exactly at C_b(t2) and spans N/2+1 samples.
Fallible<Trajectory> bt_to_wt(const Trajectory& bt, const FeaturePoints& fp);

enum class Gait { biped, quad };

struct LegPlacement {
    std::string id;     // "A".."D"
    Vec2 origin;        // frame origin in the common frame (mm)
    double phase = 0.0; // fraction of T
};

struct LegLayout {
    Gait gait = Gait::quad;
    std::vector<LegPlacement> legs;

    static LegLayout coincident_quad();
    static LegLayout coincident_biped();
};

struct MultiWt {
    std::vector<Trajectory> positioned;  // one WT per leg, common frame
    double dx_ab = 0.0, dx_bc = 0.0, dx_cd = 0.0;
    double stride = 0.0;  // 2 * l_s
};

/// Positions each leg's WT in the common frame and solves the relative
/// foot-x offsets from the take-off/landing identities. Positions are
/// computed in the take-off-anchored frame, so they are invariant to rigid
/// translation of the BT.
Fallible<MultiWt> multi_wt_layout(const Trajectory& bt, const FeaturePoints& fp,
                                  const LegLayout& layout);

// Helpers shared across modules.
Trajectory resample_closed(const Trajectory& t, int n);
Trajectory rotate_start(const Trajectory& t, int new_origin);
Trajectory translate(const Trajectory& t, const Vec2& d);
Trajectory scale(const Trajectory& t, double s);

}  // namespace clm
