#pragma once

#include <optional>
#include <vector>

#include "clm/fallible.hpp"
#include "clm/trajectory.hpp"

namespace clm {

/// Every scalar walking-performance measure of one mechanism.
/// Angles in degrees, lengths in mm, I in mm/s, S and psi in percent.
struct PerformanceReport {
    double h_s = 0, S = 0;
    double theta1 = 0, theta2 = 0, I = 0;
    double h_m = 0, h_bar = 0;
    double psi2 = 0, psi4 = 0;
    std::optional<double> mse;
    std::optional<double> fourier;
    double l_s = 0, l_w = 0;
};

struct StanceMetrics {
    double h_s = 0, l_s = 0, S = 0;  // mm, mm, %
};

/// Eq.-11/12 stance fluctuation and straightness over the stance arc
/// (t1 forward to t2).
Fallible<StanceMetrics> stance_metrics(const Trajectory& bt, const FeaturePoints& fp);

struct ImpactMetrics {
    double I = 0;       // mm/s
    double theta1 = 0;  // deg, landing
    double theta2 = 0;  // deg, take-off
};

/// Landing impact I = |v(t1)| sin(theta1) with central-difference velocity
/// estimates on the uniform grid.
ImpactMetrics impact(const Trajectory& bt, const FeaturePoints& fp);

struct CrossingStats {
    double h_m = 0, h_bar = 0;  // mm
};

/// Max crossing height and mean crossing height of a swing-phase WT:
/// h_m = max(y), h_bar = (2/T) integral y dt - min(y), trapezoidal.
CrossingStats crossing_stats(const Trajectory& wt);

struct CrossingProbability {
    double psi2 = 0, psi4 = 0;  // percent, clamped to [0, 100]
    bool clamped = false;
    bool insufficient = false;  // some leg never clears y = b
};

/// Obstacle-crossing probabilities for an obstacle of length a and height b,
/// from the intersections of the positioned WTs with the line y = b.
CrossingProbability crossing_probability(const MultiWt& wts, double a, double b, Gait gait);

/// Mean per-point Euclidean distance after aligning each curve's take-off
/// feature. Both must be closed with equal sample counts.
Fallible<double> mse(const Trajectory& candidate, const Trajectory& target);

/// Same pairing rule with the take-off indices supplied by the caller.
double mse_aligned(const Trajectory& candidate, int candidate_t2, const Trajectory& target,
                   int target_t2);

/// Distance between translation/scale/rotation/start-normalized Fourier
/// descriptors of two closed curves. Zero for similar shapes.
double fourier_distance(const Trajectory& candidate, const Trajectory& target,
                        int n_harmonics = 7);

/// Full report for a BT at its feature points (psi uses a coincident-origin
/// layout for `gait` with the given obstacle).
Fallible<PerformanceReport> performance_report(const Trajectory& bt, const FeaturePoints& fp,
                                               Gait gait = Gait::quad, double obstacle_a = 25.0,
                                               double obstacle_b = 25.0);

}  // namespace clm
