#pragma once

#include <array>
#include <optional>
#include <vector>

#include "clm/fallible.hpp"
#include "clm/linkage.hpp"
#include "clm/metrics.hpp"
#include "clm/moo.hpp"
#include "clm/trajectory.hpp"

namespace clm::rtclm {

/// Free parameter indices in X = [r1..r6, x_d, y_d, a1, b1, a3, b3, dx_EH].
namespace idx {
inline constexpr std::size_t r1 = 0, r2 = 1, r3 = 2, r4 = 3, r5 = 4, r6 = 5;
inline constexpr std::size_t xd = 6, yd = 7, a1 = 8, b1 = 9, a3 = 10, b3 = 11, dx_eh = 12;
}  // namespace idx

enum class Mode { primary, auxiliary };

/// A reconfigurable seven-bar design with its solved coupling state.
///
/// Canonical structure (documented in docs/conventions.md):
///   ground A=(0,0), D=(x_d,y_d); crank A-B (r1); C = dyad(B,D; r2,r3);
///   coupler ternary [B,C,E] with |BE|=a1, |CE|=b1; rocker [C,D] carrying the
///   derived mounts H (aux crank pivot) and F; aux crank H-F (r6);
///   thigh [E-G] (r5) and shin [F-G] (r4) meet at G; the foot sits on the
///   shin at |FP|=a3, |GP|=b3.
/// Primary mode locks H (F rides the rocker, Watt six-bar, crank AB).
/// Auxiliary mode locks A (E and H become frame pivots, four-bar, crank HF).
struct RtclmDesign {
    ParamVector params;  // topology rtclm_seven_bar
    Branches branches;   // dyad1 = loop-1 branch, dyad2 = distal branch
    int side_coupler = +1;
    int side_foot = +1;
    int direction = +1;  // crank sweep direction, searched like the branches

    double phi_A = 0.0;    // switching angle of crank AB (leg l)
    double phi_H_l = 0.0;  // switching angle of crank HF, leg l
    double phi_H_r = 0.0;  // = phi_H_l + pi
    double dy_EH = 0.0;

    Vec2 f_body, h_body;   // rocker-frame mounts (leg l)
    double a2 = 0.0, b2 = 0.0;       // |CH|, |DH|
    double df_len = 0.0, cf_len = 0.0;  // |DF|, |CF|
    double coupling_residual = 0.0;  // mm

    Vec2 lock_E, lock_H;   // aux-mode frame pivots (world, leg l)
};

/// Solves the dimensional coupling (switch angle, aux-crank angles and the
/// vertical EH offset) for the free vector X by damped Newton iteration from
/// eight deterministic aux-crank start angles. Among converged, physically
/// valid roots the one minimizing |dy_EH| is returned (tie: smaller phi_H).
Fallible<RtclmDesign> coupling_solve(const ParamVector& params, Branches branches = {},
                                     int side_coupler = +1, int side_foot = +1);

/// Pose of the active topology. Joints: A B C D E H F G, foot on the shin.
/// In auxiliary mode the locked joints stay at their switching-state
/// positions and `angle` drives crank HF.
Fallible<Pose> mode_kinematics(const RtclmDesign& design, Mode mode, double angle);

/// Closed foot trajectory of one mode over a uniform drive sweep.
Fallible<Trajectory> trace_mode(const RtclmDesign& design, Mode mode, int n,
                                double period_T = 0.5);

/// Crank conditions for both driven loops: (r1; r2, r3, |AD|) and
/// (r6; r4, r5, |EH|).
DefectReport crank_defects(const RtclmDesign& design);

struct Targets {
    double h6 = 50.0;   // primary-mode crossing height target (mm)
    double h4 = 220.0;  // auxiliary-mode crossing height target (mm)
};

struct DesignEvaluation {
    bool penalized = true;
    double f1 = moo::kPenalty, f2 = moo::kPenalty;
    std::vector<double> violations;  // crank1, crank2, order, theta1, theta2, hbar, psi
    double h6 = 0.0, h4 = 0.0;
    double psi2 = 0.0, h_bar = 0.0, h_m_aux = 0.0;
    double theta1 = 0.0, theta2 = 0.0;
    std::optional<RtclmDesign> design;
    std::optional<PerformanceReport> primary_report, auxiliary_report;
};

inline constexpr std::size_t kViolationCount = 7;

/// Total evaluation of a free vector: objectives per the squared height
/// deviations, constraint violations, and both mode reports. Kinematic
/// failures are absorbed into the penalty, never thrown.
DesignEvaluation evaluate_design(std::span<const double> x, const Targets& targets,
                                 int n_trace = 360);

/// Search bounds of the free vector.
const std::vector<double>& lower_bounds();
const std::vector<double>& upper_bounds();

struct StepwiseConfig {
    moo::AlgoConfig algo;  // population 50, fractions 2/13, 50-generation cap
    int n_trace = 360;
    StepwiseConfig() {
        algo.population = 50;
        algo.generations = 50;
        algo.crossover_fraction = 2.0 / 13.0;
        algo.mutation_fraction = 2.0 / 13.0;
    }
};

struct StepwiseResult {
    std::vector<double> genome;
    std::optional<RtclmDesign> design;
    double achieved_h6 = 0.0, achieved_h4 = 0.0;
    double f1 = 0.0, f2 = 0.0;
    bool reached_threshold = false;
    bool target_unreached = false;  // best-so-far returned with this flag set
    bool extrapolation = false;     // targets outside the demonstrated range
    moo::ParetoArchive stage1, stage2;
    moo::RunStats stats1, stats2;
};

/// Two-stage optimization: stage 1 minimizes f2 (primary mode) under the
/// box/crank/order constraints; stage 2 seeds from stage 1, adds the
/// crossing-probability constraints and f2 <= stage-1 best + 0.5, and
/// minimizes (f1, f2) with the [0.5, 0.5] stop threshold.
StepwiseResult stepwise_optimize(const Targets& targets, const StepwiseConfig& cfg);

}  // namespace clm::rtclm
