#include "clm/moo.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

namespace clm::moo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool pareto_dominates(const std::vector<double>& a, const std::vector<double>& b) {
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

}  // namespace

bool constraint_dominates(const Individual& a, const Individual& b) {
    const bool fa = a.feasible(), fb = b.feasible();
    if (fa != fb) return fa;
    if (!fa) return a.total_violation() < b.total_violation();
    return pareto_dominates(a.objectives, b.objectives);
}

std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<Individual>& pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<int> count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (constraint_dominates(pop[i], pop[j])) {
                dominated[i].push_back(j);
                ++count[j];
            } else if (constraint_dominates(pop[j], pop[i])) {
                dominated[j].push_back(i);
                ++count[i];
            }
        }
    }
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (count[i] == 0) current.push_back(i);
    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<std::size_t> next;
        for (std::size_t i : current)
            for (std::size_t j : dominated[i])
                if (--count[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<Individual>& pop,
                                      const std::vector<std::size_t>& front) {
    const std::size_t n = front.size();
    std::vector<double> d(n, 0.0);
    if (n == 0) return d;
    if (n <= 2) {
        std::fill(d.begin(), d.end(), kInf);
        return d;
    }
    const std::size_t m = pop[front[0]].objectives.size();
    std::vector<std::size_t> order(n);
    for (std::size_t obj = 0; obj < m; ++obj) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double fa = pop[front[a]].objectives[obj];
            const double fb = pop[front[b]].objectives[obj];
            return fa != fb ? fa < fb : front[a] < front[b];
        });
        const double lo = pop[front[order.front()]].objectives[obj];
        const double hi = pop[front[order.back()]].objectives[obj];
        d[order.front()] = kInf;
        d[order.back()] = kInf;
        if (hi <= lo) continue;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[order[i]] == kInf) continue;
            const double prev = pop[front[order[i - 1]]].objectives[obj];
            const double next = pop[front[order[i + 1]]].objectives[obj];
            d[order[i]] += (next - prev) / (hi - lo);
        }
    }
    return d;
}

namespace {

class Variation {
public:
    Variation(const Problem& p, const AlgoConfig& cfg, std::mt19937_64& rng)
        : p_(p), cfg_(cfg), rng_(rng) {}

    std::pair<std::vector<double>, std::vector<double>> sbx(const std::vector<double>& a,
                                                            const std::vector<double>& b) {
        std::vector<double> c1 = a, c2 = b;
        for (std::size_t i = 0; i < p_.dim; ++i) {
            if (uniform() > cfg_.crossover_fraction) continue;
            const double x1 = a[i], x2 = b[i];
            if (std::abs(x1 - x2) < 1e-14) continue;
            const double u = uniform();
            const double eta = cfg_.sbx_eta;
            const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                         : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
            c1[i] = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2);
            c2[i] = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2);
            c1[i] = std::clamp(c1[i], p_.lower[i], p_.upper[i]);
            c2[i] = std::clamp(c2[i], p_.lower[i], p_.upper[i]);
        }
        return {std::move(c1), std::move(c2)};
    }

    void polynomial_mutation(std::vector<double>& x) {
        for (std::size_t i = 0; i < p_.dim; ++i) {
            if (uniform() > cfg_.mutation_fraction) continue;
            const double lo = p_.lower[i], hi = p_.upper[i];
            if (hi <= lo) continue;
            const double u = uniform();
            const double eta = cfg_.pm_eta;
            const double delta1 = (x[i] - lo) / (hi - lo);
            const double delta2 = (hi - x[i]) / (hi - lo);
            double deltaq;
            if (u < 0.5) {
                const double val =
                    2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - delta1, eta + 1.0);
                deltaq = std::pow(val, 1.0 / (eta + 1.0)) - 1.0;
            } else {
                const double val = 2.0 * (1.0 - u) +
                                   2.0 * (u - 0.5) * std::pow(1.0 - delta2, eta + 1.0);
                deltaq = 1.0 - std::pow(val, 1.0 / (eta + 1.0));
            }
            x[i] = std::clamp(x[i] + deltaq * (hi - lo), lo, hi);
        }
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

private:
    const Problem& p_;
    const AlgoConfig& cfg_;
    std::mt19937_64& rng_;
};

void evaluate_all(const Problem& p, std::vector<Individual>& pop, int first, int jobs) {
    auto eval_one = [&](Individual& ind) {
        try {
            Evaluation e = p.evaluate(ind.genome);
            ind.objectives = std::move(e.objectives);
            ind.violations = std::move(e.violations);
        } catch (const EvaluationPanic&) {
            throw;
        } catch (const std::exception& ex) {
            throw EvaluationPanic(ex.what(), ind.genome);
        }
    };
    const int n = static_cast<int>(pop.size());
    if (jobs <= 1 || n - first <= 1) {
        for (int i = first; i < n; ++i) eval_one(pop[static_cast<std::size_t>(i)]);
        return;
    }
    // Results land by index, so the merged state is identical for any jobs.
    std::vector<std::future<void>> futures;
    const int span = n - first;
    const int chunks = std::min(jobs, span);
    for (int c = 0; c < chunks; ++c) {
        futures.push_back(std::async(std::launch::async, [&, c] {
            for (int i = first + c; i < n; i += chunks) eval_one(pop[static_cast<std::size_t>(i)]);
        }));
    }
    for (auto& f : futures) f.get();
}

void assign_ranks(std::vector<Individual>& pop,
                  std::vector<std::vector<std::size_t>>& fronts,
                  std::vector<double>& crowding_all) {
    fronts = nondominated_sort(pop);
    crowding_all.assign(pop.size(), 0.0);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        const auto cd = crowding_distance(pop, fronts[r]);
        for (std::size_t i = 0; i < fronts[r].size(); ++i) {
            pop[fronts[r][i]].rank = static_cast<int>(r);
            crowding_all[fronts[r][i]] = cd[i];
        }
    }
}

}  // namespace

ParetoArchive Nsga2::run(const Problem& p, const AlgoConfig& cfg, RunStats* stats) {
    std::mt19937_64 rng(cfg.seed);
    const int n = cfg.population;
    std::vector<Individual> pop;
    pop.reserve(static_cast<std::size_t>(2 * n));

    for (std::size_t s = 0; s < p.seeds.size() && pop.size() < static_cast<std::size_t>(n); ++s) {
        Individual ind;
        ind.genome = p.seeds[s];
        for (std::size_t i = 0; i < p.dim; ++i)
            ind.genome[i] = std::clamp(ind.genome[i], p.lower[i], p.upper[i]);
        pop.push_back(std::move(ind));
    }
    while (pop.size() < static_cast<std::size_t>(n)) {
        Individual ind;
        ind.genome.resize(p.dim);
        for (std::size_t i = 0; i < p.dim; ++i)
            ind.genome[i] =
                std::uniform_real_distribution<double>(p.lower[i], p.upper[i])(rng);
        pop.push_back(std::move(ind));
    }
    evaluate_all(p, pop, 0, cfg.jobs);

    std::vector<std::vector<std::size_t>> fronts;
    std::vector<double> crowd;
    assign_ranks(pop, fronts, crowd);

    Variation var(p, cfg, rng);
    // Draw parents only from the evaluated, ranked range.
    auto tournament = [&](std::size_t parents) -> const Individual& {
        std::uniform_int_distribution<std::size_t> pick(0, parents - 1);
        const std::size_t a = pick(rng), b = pick(rng);
        if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank ? pop[a] : pop[b];
        if (crowd[a] != crowd[b]) return crowd[a] > crowd[b] ? pop[a] : pop[b];
        return pop[std::min(a, b)];
    };

    double elite_best = kInf;
    auto track_elite = [&](std::size_t first) {
        if (!stats || !p.elite_score) return;
        for (std::size_t i = first; i < pop.size(); ++i) {
            const double s = p.elite_score(pop[i]);
            if (s < elite_best) {
                elite_best = s;
                stats->elite = pop[i];
            }
        }
    };
    auto record = [&](int gen) {
        if (!stats) return;
        std::vector<double> best(p.n_objectives, kInf);
        for (const auto& ind : pop)
            if (ind.feasible())
                for (std::size_t j = 0; j < p.n_objectives; ++j)
                    best[j] = std::min(best[j], ind.objectives[j]);
        stats->best_feasible_per_objective.push_back(std::move(best));
        stats->generations_run = gen;
    };
    track_elite(0);
    record(0);

    auto threshold_met = [&]() {
        if (!cfg.stop_thresholds) return false;
        const auto& th = *cfg.stop_thresholds;
        for (const auto& ind : pop) {
            if (!ind.feasible()) continue;
            bool all = true;
            for (std::size_t j = 0; j < p.n_objectives && j < th.size(); ++j)
                if (!(ind.objectives[j] < th[j])) {
                    all = false;
                    break;
                }
            if (all) return true;
        }
        return false;
    };

    int gen = 0;
    bool stopped = threshold_met();
    while (gen < cfg.generations && !stopped) {
        ++gen;
        const std::size_t parents = pop.size();
        while (pop.size() < parents + static_cast<std::size_t>(n)) {
            auto [c1, c2] = var.sbx(tournament(parents).genome, tournament(parents).genome);
            var.polynomial_mutation(c1);
            var.polynomial_mutation(c2);
            Individual i1, i2;
            i1.genome = std::move(c1);
            i2.genome = std::move(c2);
            i1.generation = i2.generation = gen;
            pop.push_back(std::move(i1));
            if (pop.size() < parents + static_cast<std::size_t>(n)) pop.push_back(std::move(i2));
        }
        evaluate_all(p, pop, static_cast<int>(parents), cfg.jobs);
        track_elite(parents);
        assign_ranks(pop, fronts, crowd);

        // Environmental selection: fill from fronts, crowding-truncate the last.
        std::vector<Individual> next;
        std::vector<double> next_crowd;
        next.reserve(static_cast<std::size_t>(n));
        for (const auto& front : fronts) {
            if (next.size() >= static_cast<std::size_t>(n)) break;
            if (next.size() + front.size() <= static_cast<std::size_t>(n)) {
                for (std::size_t i : front) {
                    next.push_back(pop[i]);
                    next_crowd.push_back(crowd[i]);
                }
            } else {
                std::vector<std::size_t> order(front.size());
                for (std::size_t i = 0; i < front.size(); ++i) order[i] = i;
                const auto cd = crowding_distance(pop, front);
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    return cd[a] != cd[b] ? cd[a] > cd[b] : front[a] < front[b];
                });
                for (std::size_t i : order) {
                    if (next.size() >= static_cast<std::size_t>(n)) break;
                    next.push_back(pop[front[i]]);
                    next_crowd.push_back(cd[i]);
                }
            }
        }
        pop = std::move(next);
        assign_ranks(pop, fronts, crowd);
        record(gen);
        stopped = threshold_met();
    }

    ParetoArchive archive;
    archive.provenance.generation = gen;
    archive.provenance.seed = cfg.seed;
    for (std::size_t i : fronts.empty() ? std::vector<std::size_t>{} : fronts[0])
        archive.individuals.push_back(pop[i]);
    if (stats) stats->stopped_by_threshold = stopped;
    return archive;
}

ParetoArchive evolve(const Problem& problem, const AlgoConfig& cfg, RunStats* stats) {
    Nsga2 algo;
    return algo.run(problem, cfg, stats);
}

Fallible<std::vector<Individual>> knee_points(const ParetoArchive& archive, int k) {
    const auto& front = archive.individuals;
    if (front.empty()) return Fault{FaultKind::empty_archive};
    const std::size_t m = front[0].objectives.size();
    std::vector<double> lo(m, kInf), hi(m, -kInf);
    for (const auto& ind : front)
        for (std::size_t j = 0; j < m; ++j) {
            lo[j] = std::min(lo[j], ind.objectives[j]);
            hi[j] = std::max(hi[j], ind.objectives[j]);
        }
    bool any_range = false;
    for (std::size_t j = 0; j < m; ++j) any_range |= hi[j] > lo[j];
    if (!any_range) return Fault{FaultKind::degenerate_front};

    auto normalized = [&](const Individual& ind) {
        std::vector<double> f(m);
        for (std::size_t j = 0; j < m; ++j)
            f[j] = hi[j] > lo[j] ? (ind.objectives[j] - lo[j]) / (hi[j] - lo[j]) : 0.0;
        return f;
    };

    // Extreme members: argmin per normalized objective.
    std::vector<std::size_t> extremes;
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < front.size(); ++i)
            if (front[i].objectives[j] < front[best].objectives[j]) best = i;
        extremes.push_back(best);
    }

    std::vector<double> distance(front.size(), 0.0);
    if (m == 2) {
        const auto a = normalized(front[extremes[0]]);
        const auto b = normalized(front[extremes[1]]);
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        for (std::size_t i = 0; i < front.size(); ++i) {
            const auto f = normalized(front[i]);
            if (len < 1e-12) {
                distance[i] = 0.0;
            } else {
                // Positive toward the ideal point (below the chord).
                distance[i] = ((b[0] - a[0]) * (a[1] - f[1]) - (a[0] - f[0]) * (b[1] - a[1])) / len;
            }
        }
    } else {
        // Distance toward the origin from the plane through the extremes;
        // falls back to the all-ones plane when they are degenerate.
        std::vector<double> nvec(m, 1.0);
        double offset = 1.0;
        if (m == 3) {
            const auto p0 = normalized(front[extremes[0]]);
            const auto p1 = normalized(front[extremes[1]]);
            const auto p2 = normalized(front[extremes[2]]);
            const double ux = p1[0] - p0[0], uy = p1[1] - p0[1], uz = p1[2] - p0[2];
            const double vx = p2[0] - p0[0], vy = p2[1] - p0[1], vz = p2[2] - p0[2];
            std::vector<double> cr{uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx};
            const double nn = std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]);
            if (nn > 1e-9) {
                for (std::size_t j = 0; j < 3; ++j) nvec[j] = cr[j] / nn;
                offset = nvec[0] * p0[0] + nvec[1] * p0[1] + nvec[2] * p0[2];
                if (offset < 0) {
                    for (auto& c : nvec) c = -c;
                    offset = -offset;
                }
            } else {
                const double nn1 = std::sqrt(3.0);
                for (auto& c : nvec) c = 1.0 / nn1;
                offset = 0.0;
                for (std::size_t j = 0; j < 3; ++j) offset += nvec[j] * p0[j];
            }
        }
        for (std::size_t i = 0; i < front.size(); ++i) {
            const auto f = normalized(front[i]);
            double proj = 0.0;
            for (std::size_t j = 0; j < m; ++j) proj += nvec[j] * f[j];
            distance[i] = offset - proj;
        }
    }

    std::vector<std::size_t> order(front.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return distance[a] != distance[b] ? distance[a] > distance[b] : a < b;
    });
    std::vector<Individual> out;
    for (std::size_t i = 0; i < order.size() && static_cast<int>(out.size()) < k; ++i)
        out.push_back(front[order[i]]);
    return out;
}

}  // namespace clm::moo
