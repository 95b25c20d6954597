#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clm/fallible.hpp"

namespace clm::moo {

/// Added to every objective when a genome has no kinematic solution.
inline constexpr double kPenalty = 1e10;

struct Individual {
    std::vector<double> genome;
    std::vector<double> objectives;
    std::vector<double> violations;  // raw g values; <= 0 means satisfied
    int rank = 0;
    double crowding = 0.0;
    int generation = 0;

    double total_violation() const {
        double s = 0.0;
        for (double g : violations) s += g > 0.0 ? g : 0.0;
        return s;
    }
    bool feasible() const { return total_violation() <= 0.0; }
};

struct AlgoConfig {
    int population = 60;
    int generations = 150;
    double crossover_fraction = 1.0 / 8.0;  // per-gene SBX probability
    double mutation_fraction = 1.0 / 8.0;   // per-gene polynomial-mutation probability
    std::uint64_t seed = 1;
    std::optional<std::vector<double>> stop_thresholds;
    double sbx_eta = 15.0;
    double pm_eta = 20.0;
    int jobs = 1;
};

struct Evaluation {
    std::vector<double> objectives;
    std::vector<double> violations;
};

struct Problem {
    std::size_t dim = 0;
    std::size_t n_objectives = 0;
    std::vector<double> lower, upper;
    std::function<Evaluation(std::span<const double>)> evaluate;  // pure
    std::vector<std::vector<double>> seeds;  // genomes injected into the initial population
    // Optional scalar score over (objectives, violations); the best-scoring
    // individual ever evaluated is kept aside for selection stages.
    std::function<double(const Individual&)> elite_score;
};

struct Provenance {
    std::string subtask;
    int generation = 0;
    std::uint64_t seed = 0;
};

struct ParetoArchive {
    std::vector<Individual> individuals;
    Provenance provenance;
};

struct RunStats {
    int generations_run = 0;
    bool stopped_by_threshold = false;
    std::vector<std::vector<double>> best_feasible_per_objective;  // per generation
    std::optional<Individual> elite;  // best elite_score seen, when scoring is on
};

/// Raised out of evolve() when the problem's evaluate callback throws.
struct EvaluationPanic : std::runtime_error {
    std::vector<double> genome;
    EvaluationPanic(const std::string& what, std::vector<double> g)
        : std::runtime_error(what), genome(std::move(g)) {}
};

/// Constraint-domination: feasible beats infeasible; among infeasible lower
/// total violation wins; among feasible, Pareto-domination.
bool constraint_dominates(const Individual& a, const Individual& b);

/// Fronts by constraint-domination; front 0 is mutually non-dominated.
std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<Individual>& pop);

/// Crowding distances for one front (indices into pop). Boundary members
/// get +infinity.
std::vector<double> crowding_distance(const std::vector<Individual>& pop,
                                      const std::vector<std::size_t>& front);

/// Abstract engine so other algorithms can be plugged in later.
class Algorithm {
public:
    virtual ~Algorithm() = default;
    virtual ParetoArchive run(const Problem& problem, const AlgoConfig& cfg,
                              RunStats* stats = nullptr) = 0;
    virtual std::string name() const = 0;
};

class Nsga2 final : public Algorithm {
public:
    ParetoArchive run(const Problem& problem, const AlgoConfig& cfg,
                      RunStats* stats = nullptr) override;
    std::string name() const override { return "nsga2"; }
};

/// NSGA-II with SBX + polynomial mutation; bit-reproducible for a fixed seed
/// and any jobs count.
ParetoArchive evolve(const Problem& problem, const AlgoConfig& cfg, RunStats* stats = nullptr);

/// The k archive members with maximum perpendicular distance to the
/// chord/hyperplane through the front's per-objective extremes, after
/// min-max normalization. k defaults to 9 so the pool stays below ten.
Fallible<std::vector<Individual>> knee_points(const ParetoArchive& archive, int k = 9);

}  // namespace clm::moo
