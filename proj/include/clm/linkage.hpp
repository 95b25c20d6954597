#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "clm/fallible.hpp"
#include "clm/geometry.hpp"
#include "clm/trajectory_types.hpp"

namespace clm {

enum class Topology { four_bar, watt1, stephenson1, stephenson3, rtclm_seven_bar };

const char* topology_name(Topology t);
Fallible<Topology> topology_from_name(const std::string& name);

/// Number of entries a ParamVector must carry for a topology.
std::size_t topology_arity(Topology t);

/// Ordered parameter names, matching the mechanism JSON schema.
const std::vector<std::string>& topology_param_names(Topology t);

/// True for parameters that must be strictly positive (crank, ground and
/// dyad leg lengths). Signed local offsets and coordinates may be any real.
const std::vector<bool>& topology_positive_required(Topology t);

/// True for parameters carrying a length dimension (scaled by similarity
/// transforms); false for angles.
const std::vector<bool>& topology_length_dimension(Topology t);

struct ParamVector {
    Topology topology = Topology::stephenson1;
    std::vector<double> values;

    bool arity_ok() const { return values.size() == topology_arity(topology); }
    /// nullopt when valid, otherwise a description of the violated invariant.
    std::optional<std::string> invalid_reason() const;
};

/// Six-bar / four-bar parameter indices (order matches the parameter tables:
/// b, g, x_a, y_a, r1..r12; the four-bar stops at r6).
namespace sixbar {
inline constexpr std::size_t b = 0, g = 1, xa = 2, ya = 3, r1 = 4;
inline constexpr std::size_t r(std::size_t i) { return 3 + i; }  // r(1) == r1
}  // namespace sixbar

/// Branch flags, one per RRR dyad in solve order.
struct Branches {
    int dyad1 = +1;
    int dyad2 = +1;
};

struct Pose {
    double crank_angle = 0.0;
    std::vector<Vec2> joints;  // topology-specific order, see forward_kinematics
    Vec2 foot;
    Branches branches;
};

struct DefectReport {
    bool has_crank_defect = false;
    bool has_loop_defect = false;
    bool has_branch_defect = false;
    std::optional<double> first_failing_angle;
};

/// Intersects the circles (p1, l1) and (p2, l2). `branch = +1` selects the
/// solution on the left of the directed line p1->p2.
Fallible<Vec2> solve_dyad_rrr(const Vec2& p1, const Vec2& p2, double l1, double l2, int branch);

/// Point rigidly attached to the link p->q, at signed offsets (along, perp)
/// in the link's local frame.
Vec2 link_point(const Vec2& p, const Vec2& q, double along, double pperp);

/// Point R with |PR| = da and |QR| = db, on the `side` (+1 = left) of P->Q.
Fallible<Vec2> triangle_point(const Vec2& p, const Vec2& q, double da, double db, int side);

/// Joint order in Pose::joints:
///   four_bar:     A B C D
///   six-bars:     A B C D E H F   (E, H are the dyad-2 anchor points)
/// The RTCLM is posed via the rtclm module (it needs solved coupling state).
Fallible<Pose> forward_kinematics(const ParamVector& params, double crank_angle,
                                  Branches branches = {});

/// Deviations of every defining length/offset constraint of the pose, in mm.
/// The maximum is the loop-closure residual.
std::vector<double> closure_residuals(const ParamVector& params, const Pose& pose);

/// Grashof-style crank-rotatability test on the driven loop:
/// r_crank + 2*max(others) < sum(others), strict. For the RTCLM parameter
/// vector only the first loop is testable here (the second needs the solved
/// coupling offset); rtclm::crank_defects covers both.
DefectReport check_crank_defect(const ParamVector& params);

/// Crank condition for one loop given the crank length and the three other
/// effective bar lengths.
bool crank_condition_holds(double r_crank, double o1, double o2, double o3);

struct TraceOptions {
    double period_T = 0.5;  // s; 2 Hz drive unless overridden
    int direction = +1;     // -1 sweeps the crank backwards
};

/// Uniform crank sweep over [0, 2pi), foot points only. Fails with
/// BranchDiscontinuity when consecutive points jump by more than
/// 0.2 x mechanism scale.
Fallible<Trajectory> trace_bt(const ParamVector& params, int n, Branches branches = {},
                              TraceOptions opt = {});

/// Sum of |r_i| over length-type parameters; the scale used by the branch
/// continuity check.
double mechanism_scale(const ParamVector& params);

/// Sweeps `n` angles and reports loop/branch defects empirically, plus the
/// Eq.-style crank verdict.
DefectReport sweep_defects(const ParamVector& params, int n = 3600, Branches branches = {});

}  // namespace clm
