#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clm/fallible.hpp"
#include "clm/linkage.hpp"
#include "clm/metrics.hpp"
#include "clm/moo.hpp"
#include "clm/target_curves.hpp"
#include "clm/trajectory.hpp"

namespace clm::hier {

/// Design objective values of one six-bar genome against the target:
/// f1 = MSE, f2 = banded stance-length deviation, f3 = squared lowest-point
/// error, f4 = h_s, f5 = I. Penalized genomes carry kPenalty in every f.
struct SixbarEval {
    bool penalized = true;
    double f1 = moo::kPenalty, f2 = moo::kPenalty, f3 = moo::kPenalty;
    double f4 = moo::kPenalty, f5 = moo::kPenalty;
    double fourier = moo::kPenalty;
    double l_s = 0.0, y_low = 0.0;
    Branches branches;
    std::optional<PerformanceReport> report;
};

/// Shared evaluation context: the target curve with cached features.
class TargetContext {
public:
    TargetContext(Trajectory target, CycloidSpec spec);
    const Trajectory& target() const { return target_; }
    const CycloidSpec& spec() const { return spec_; }
    int target_t2() const { return target_t2_; }
    double target_low_y() const { return target_low_y_; }

private:
    Trajectory target_;
    CycloidSpec spec_;
    int target_t2_ = 0;
    double target_low_y_ = 0.0;
};

SixbarEval evaluate_sixbar(const TargetContext& ctx, Topology topology,
                           std::span<const double> genome, int n_trace);

/// Appendix-style predesign search box: angles in [-pi, pi], frame and signed
/// offsets in [-500, 500], lengths in [30, 500].
std::vector<double> predesign_lower(Topology t);
std::vector<double> predesign_upper(Topology t);

struct SubtaskBox {
    std::vector<double> lower, upper;
};

/// Incumbent-centred search box: per gene max(frac*|x|, abs_mm) for lengths,
/// frac*|x| for angles, intersected with the predesign box.
SubtaskBox subtask_box(Topology t, std::span<const double> center, double frac, double abs_mm);

struct PipelineConfig {
    moo::AlgoConfig algo;          // per-subtask budget (population, generations)
    int n_trace = 360;
    CycloidSpec target_spec{};     // L, H, T
    bool flip_y = false;
    bool full_budget = false;      // population 200 in the subtasks as reported
    // The global shape search always runs at the reported population and
    // twice the per-subtask generation budget.
    int predesign_population = 200;
};

struct Incumbent {
    std::vector<double> genome;
    SixbarEval eval;
};

struct DesignRun {
    Topology topology = Topology::stephenson1;
    Incumbent x0, x1, x2, x3;
    moo::ParetoArchive predesign_archive, s1, s2, s3;
};

Fallible<Incumbent> predesign(Topology t, const TargetContext& ctx, const PipelineConfig& cfg,
                              moo::ParetoArchive* archive_out = nullptr);

struct SubtaskResult {
    moo::ParetoArchive archive;
    Incumbent incumbent;
};

/// `extra_seeds` joins the initial population (clamped into the box); the
/// pipeline passes the predesign knee pool through it.
Fallible<SubtaskResult> subtask1(Topology t, const TargetContext& ctx, const Incumbent& x0,
                                 const PipelineConfig& cfg,
                                 const std::vector<std::vector<double>>& extra_seeds = {});
Fallible<SubtaskResult> subtask2(Topology t, const TargetContext& ctx, const Incumbent& x1,
                                 const PipelineConfig& cfg);
Fallible<SubtaskResult> subtask3(Topology t, const TargetContext& ctx, const Incumbent& x2,
                                 const PipelineConfig& cfg);

/// The whole coarse-to-fine flow: predesign then subtasks 1-3.
Fallible<DesignRun> run_pipeline(Topology t, const PipelineConfig& cfg);

struct SingleLevelResult {
    moo::ParetoArchive archive;
    Incumbent min_f1, min_f4, min_f5;
};

/// Direct five-objective baseline over the full predesign box at the same
/// total budget as the hierarchical flow.
Fallible<SingleLevelResult> run_single_level(Topology t, const PipelineConfig& cfg);

struct DecideCriteria {
    std::size_t priority_objective = 0;
    // Preference tiers, strongest first; the first non-empty filtered pool
    // wins. Each tier is a conjunction of (objective, threshold) bounds.
    std::vector<std::vector<std::pair<std::size_t, double>>> preferred_tiers;
    // Best-effort cap on one objective (the incumbent's value).
    std::optional<std::pair<std::size_t, double>> guard;
};

/// Deterministic replacement for manual Pareto-set selection: knee pool,
/// strict feasibility, then the criteria ladder, then lexicographic genome.
Fallible<moo::Individual> decide(const moo::ParetoArchive& archive, const DecideCriteria& crit);

}  // namespace clm::hier
