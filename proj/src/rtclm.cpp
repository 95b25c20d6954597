#include "clm/rtclm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace clm::rtclm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTau = 2.0 * kPi;
constexpr double kResidualTol = 1e-9;  // mm

struct LoopOnePose {
    Vec2 B, C, E;
    Frame2 rocker;  // origin D, x-axis toward C
};

Fallible<LoopOnePose> loop_one(const ParamVector& p, double phi, Branches br, int side_coupler) {
    const auto& v = p.values;
    const Vec2 D{v[idx::xd], v[idx::yd]};
    LoopOnePose s;
    s.B = polar(v[idx::r1], phi);
    auto c = solve_dyad_rrr(s.B, D, v[idx::r2], v[idx::r3], br.dyad1);
    if (!c) return Fault{c.fault().kind, phi};
    s.C = *c;
    auto e = triangle_point(s.B, s.C, v[idx::a1], v[idx::b1], side_coupler);
    if (!e) return Fault{FaultKind::imaginary_branch, phi};
    s.E = *e;
    s.rocker = frame_through(D, s.C);
    return s;
}

double wrap_tau(double a) {
    a = std::fmod(a, kTau);
    if (a < 0) a += kTau;
    return a;
}

struct CouplingRoot {
    double psi = 0.0, dy = 0.0;
    double residual_mm = 0.0;
};

}  // namespace

Fallible<RtclmDesign> coupling_solve(const ParamVector& params, Branches br, int side_coupler,
                                     int side_foot) {
    if (auto reason = params.invalid_reason()) return Fault{FaultKind::out_of_range};
    const auto& v = params.values;
    const Vec2 D{v[idx::xd], v[idx::yd]};
    const double r6 = v[idx::r6];
    const double dx = v[idx::dx_eh];

    // Switch angle: y_E(phi) = y_E(phi + pi), canonical root with
    // x_E(phi) < x_E(phi + pi), smallest phi.
    const int grid = 720;
    auto gap = [&](double phi) -> Fallible<double> {
        auto l = loop_one(params, phi, br, side_coupler);
        if (!l) return l.fault();
        auto r = loop_one(params, phi + kPi, br, side_coupler);
        if (!r) return r.fault();
        return l->E.y - r->E.y;
    };
    std::optional<double> phi_A;
    std::optional<double> prev_phi;
    double prev_gap = 0.0;
    for (int k = 0; k <= grid; ++k) {
        const double phi = kTau * k / grid;
        auto g = gap(phi);
        if (!g) {
            prev_phi.reset();
            continue;
        }
        if (prev_phi && ((*g > 0) != (prev_gap > 0) || *g == 0.0)) {
            double lo = *prev_phi, hi = phi, glo = prev_gap;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                auto gm = gap(mid);
                if (!gm) break;
                if ((*gm > 0) == (glo > 0)) {
                    lo = mid;
                    glo = *gm;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            auto pl = loop_one(params, root, br, side_coupler);
            auto pr = loop_one(params, root + kPi, br, side_coupler);
            if (pl && pr && pl->E.x < pr->E.x && !phi_A) phi_A = wrap_tau(root);
        }
        prev_phi = phi;
        prev_gap = *g;
    }
    if (!phi_A) return Fault{FaultKind::coupling_no_root};

    auto pl = loop_one(params, *phi_A, br, side_coupler);
    auto pr = loop_one(params, *phi_A + kPi, br, side_coupler);
    if (!pl || !pr) return Fault{FaultKind::coupling_no_root};
    const Vec2 El = pl->E, Er = pr->E, Cl = pl->C, Cr = pr->C;

    // Newton in (psi, dy) on the rigid-rocker consistency map: the rocker
    // turns about D between the two switching poses, so the (single) F mount
    // must satisfy F_r = M(F_l) with M the pose change. The aux cranks sit
    // half a turn apart: F_l = H_l + r6<psi, F_r = H_r - r6<psi.
    const double dalpha =
        std::atan2(Cr.y - D.y, Cr.x - D.x) - std::atan2(Cl.y - D.y, Cl.x - D.x);
    const double ca = std::cos(dalpha), sa = std::sin(dalpha);
    auto rot = [&](const Vec2& p) { return Vec2{ca * p.x - sa * p.y, sa * p.x + ca * p.y}; };
    auto residuals = [&](double psi, double dy, double out[2], Vec2& Fl, Vec2& Fr) {
        const Vec2 Hl = El + Vec2{dx, dy};
        const Vec2 Hr = Er + Vec2{dx, dy};
        Fl = Hl + polar(r6, psi);
        Fr = Hr - polar(r6, psi);
        const Vec2 mapped = D + rot(Fl - D);
        out[0] = Fr.x - mapped.x;
        out[1] = Fr.y - mapped.y;
    };

    std::vector<CouplingRoot> roots;
    for (int s = 0; s < 8; ++s) {
        double psi = kTau * s / 8.0, dy = 0.0;
        double R[2];
        Vec2 Fl, Fr;
        residuals(psi, dy, R, Fl, Fr);
        bool converged = false;
        for (int it = 0; it < 80; ++it) {
            const Vec2 tang = polar(r6, psi + kPi / 2.0);
            const Vec2 dpsi_col = -tang - rot(tang);
            const Vec2 ddy_col = Vec2{0, 1} - rot({0, 1});
            const double det = dpsi_col.x * ddy_col.y - ddy_col.x * dpsi_col.y;
            if (std::abs(det) < 1e-14) break;
            const double dpsi = (-R[0] * ddy_col.y + R[1] * ddy_col.x) / det;
            const double ddy = (-dpsi_col.x * R[1] + dpsi_col.y * R[0]) / det;
            double lambda = 1.0;
            const double base = std::abs(R[0]) + std::abs(R[1]);
            for (int h = 0; h < 16; ++h) {
                double Rn[2];
                Vec2 Fl2, Fr2;
                residuals(psi + lambda * dpsi, dy + lambda * ddy, Rn, Fl2, Fr2);
                if (std::abs(Rn[0]) + std::abs(Rn[1]) < base) break;
                lambda *= 0.5;
            }
            psi += lambda * dpsi;
            dy += lambda * ddy;
            residuals(psi, dy, R, Fl, Fr);
            if (std::abs(R[0]) + std::abs(R[1]) < 1e-12 * (1.0 + norm(Fl))) {
                converged = true;
                break;
            }
        }
        if (!converged) continue;
        const double res_mm = std::max(std::abs(norm(Fl - D) - norm(Fr - D)),
                                       std::abs(norm(Fl - Cl) - norm(Fr - Cr)));
        if (res_mm > kResidualTol) continue;
        CouplingRoot root{wrap_tau(psi), dy, res_mm};
        bool dup = false;
        for (const auto& q : roots)
            if (std::abs(q.psi - root.psi) < 1e-6 && std::abs(q.dy - root.dy) < 1e-6) dup = true;
        if (!dup) roots.push_back(root);
    }
    if (roots.empty()) return Fault{FaultKind::coupling_no_root};

    std::sort(roots.begin(), roots.end(), [](const CouplingRoot& a, const CouplingRoot& b) {
        return std::abs(a.dy) != std::abs(b.dy) ? std::abs(a.dy) < std::abs(b.dy)
                                                : a.psi < b.psi;
    });
    const CouplingRoot& best = roots.front();

    RtclmDesign d;
    d.params = params;
    d.branches = br;
    d.side_coupler = side_coupler;
    d.side_foot = side_foot;
    d.phi_A = *phi_A;
    d.phi_H_l = best.psi;
    d.phi_H_r = wrap_tau(best.psi + kPi);
    d.dy_EH = best.dy;
    d.coupling_residual = best.residual_mm;
    d.lock_E = El;
    d.lock_H = El + Vec2{dx, best.dy};
    const Vec2 Fl = d.lock_H + polar(r6, best.psi);
    d.f_body = pl->rocker.to_local(Fl);
    d.h_body = pl->rocker.to_local(d.lock_H);
    d.a2 = dist(Cl, d.lock_H);
    d.b2 = dist(D, d.lock_H);
    d.df_len = dist(D, Fl);
    d.cf_len = dist(Cl, Fl);
    if (d.a2 < 1e-9 || d.b2 < 1e-9 || d.df_len < 1e-9 || d.cf_len < 1e-9)
        return Fault{FaultKind::coupling_no_root};
    return d;
}

Fallible<Pose> mode_kinematics(const RtclmDesign& d, Mode mode, double angle) {
    const auto& v = d.params.values;
    const Vec2 D{v[idx::xd], v[idx::yd]};
    Pose pose;
    pose.crank_angle = angle;
    pose.branches = d.branches;

    Vec2 B, C, E, H, F;
    if (mode == Mode::primary) {
        auto l = loop_one(d.params, angle, d.branches, d.side_coupler);
        if (!l) return l.fault();
        B = l->B;
        C = l->C;
        E = l->E;
        H = l->rocker.to_world(d.h_body);
        F = l->rocker.to_world(d.f_body);
    } else {
        auto l = loop_one(d.params, d.phi_A, d.branches, d.side_coupler);
        if (!l) return l.fault();
        B = l->B;
        C = l->C;
        E = d.lock_E;
        H = d.lock_H;
        F = H + polar(v[idx::r6], angle);
    }
    auto g = solve_dyad_rrr(E, F, v[idx::r5], v[idx::r4], d.branches.dyad2);
    if (!g) return Fault{g.fault().kind, angle};
    auto foot = triangle_point(F, *g, v[idx::a3], v[idx::b3], d.side_foot);
    if (!foot) return Fault{FaultKind::imaginary_branch, angle};
    pose.joints = {Vec2{0, 0}, B, C, D, E, H, F, *g};
    pose.foot = *foot;
    return pose;
}

Fallible<Trajectory> trace_mode(const RtclmDesign& d, Mode mode, int n, double period_T) {
    Trajectory t;
    t.period_T = period_T;
    t.closed = true;
    t.points.reserve(static_cast<std::size_t>(n));
    const double jump_limit = 0.2 * mechanism_scale(d.params);
    Vec2 prev;
    for (int k = 0; k < n; ++k) {
        const double a = d.direction * kTau * k / n;
        auto pose = mode_kinematics(d, mode, a);
        if (!pose) return pose.fault();
        if (k > 0 && dist(pose->foot, prev) > jump_limit)
            return Fault{FaultKind::branch_discontinuity, a};
        prev = pose->foot;
        t.points.push_back(pose->foot);
    }
    if (dist(t.points.front(), t.points.back()) > jump_limit)
        return Fault{FaultKind::branch_discontinuity, 0.0};
    return t;
}

DefectReport crank_defects(const RtclmDesign& d) {
    const auto& v = d.params.values;
    DefectReport rep;
    const double d1 = std::hypot(v[idx::xd], v[idx::yd]);
    const double d2 = std::hypot(v[idx::dx_eh], d.dy_EH);
    rep.has_crank_defect = !crank_condition_holds(v[idx::r1], v[idx::r2], v[idx::r3], d1) ||
                           !crank_condition_holds(v[idx::r6], v[idx::r4], v[idx::r5], d2);
    return rep;
}

const std::vector<double>& lower_bounds() {
    static const std::vector<double> lb{30, 50, 50, 50, 50, 20, -150, -150, 50, 50, 50, 50, 100};
    return lb;
}

const std::vector<double>& upper_bounds() {
    static const std::vector<double> ub{100, 250, 250, 250, 250, 100, 150, 150,
                                        350, 350, 300, 300, 300};
    return ub;
}

namespace {

/// Crank-condition violations (LHS - RHS, <= 0 when satisfied).
std::array<double, 2> crank_violations(const std::vector<double>& v, double dy) {
    const double d1 = std::hypot(v[idx::xd], v[idx::yd]);
    const double d2 = std::hypot(v[idx::dx_eh], dy);
    return {v[idx::r1] + 2.0 * std::max({v[idx::r2], v[idx::r3], d1}) -
                (v[idx::r2] + v[idx::r3] + d1),
            v[idx::r6] + 2.0 * std::max({v[idx::r4], v[idx::r5], d2}) -
                (v[idx::r4] + v[idx::r5] + d2)};
}

/// Feature-time order must be a cyclic rotation of (t1, t2, t5, t4).
bool order_ok(const FeaturePoints& fp, int n) {
    std::array<std::pair<int, int>, 4> seq{{{fp.t1.index, 1}, {fp.t2.index, 2},
                                            {fp.t5.index, 5}, {fp.t4.index, 4}}};
    std::sort(seq.begin(), seq.end());
    (void)n;
    std::array<int, 4> labels;
    std::size_t start = 0;
    while (start < 4 && seq[start].second != 1) ++start;
    if (start == 4) return false;
    for (std::size_t k = 0; k < 4; ++k) labels[k] = seq[(start + k) % 4].second;
    return labels == std::array<int, 4>{1, 2, 5, 4};
}

Trajectory rebased_wt(const Trajectory& wt) {
    Trajectory out = wt;
    const double y0 = wt.points.front().y;
    for (auto& p : out.points) p.y -= y0;
    return out;
}

}  // namespace

DesignEvaluation evaluate_design(std::span<const double> x, const Targets& targets, int n_trace) {
    DesignEvaluation ev;
    ev.violations.assign(kViolationCount, 0.0);

    ParamVector pv;
    pv.topology = Topology::rtclm_seven_bar;
    pv.values.assign(x.begin(), x.end());
    if (pv.invalid_reason()) return ev;

    // The assembly choice (crank direction and dyad branches) is searched;
    // the best defect-free configuration represents the genome.
    double best_key[2] = {0.0, 0.0};
    for (int dir : {+1, -1}) {
        for (Branches br : {Branches{+1, +1}, Branches{+1, -1}, Branches{-1, +1},
                            Branches{-1, -1}}) {
            auto solved = coupling_solve(pv, br);
            if (!solved) continue;
            solved->direction = dir;
            auto bt_primary = trace_mode(*solved, Mode::primary, n_trace);
            if (!bt_primary) continue;
            auto bt_aux = trace_mode(*solved, Mode::auxiliary, n_trace);
            if (!bt_aux) continue;
            auto fp_p = find_feature_points(*bt_primary);
            auto fp_a = find_feature_points(*bt_aux);
            if (!fp_p || !fp_a) continue;
            auto wt_p = bt_to_wt(*bt_primary, *fp_p);
            auto wt_a = bt_to_wt(*bt_aux, *fp_a);
            if (!wt_p || !wt_a) continue;
            auto layout_a = multi_wt_layout(*bt_aux, *fp_a, LegLayout::coincident_quad());
            if (!layout_a) continue;

            DesignEvaluation cand;
            cand.violations.assign(kViolationCount, 0.0);
            cand.penalized = false;
            cand.design = *solved;
            cand.h6 = crossing_stats(rebased_wt(*wt_p)).h_m;
            const auto cs_aux = crossing_stats(rebased_wt(*wt_a));
            cand.h4 = cs_aux.h_m;
            cand.h_m_aux = cs_aux.h_m;
            cand.h_bar = cs_aux.h_bar;
            cand.f1 = (cand.h4 - targets.h4) * (cand.h4 - targets.h4);
            cand.f2 = (cand.h6 - targets.h6) * (cand.h6 - targets.h6);

            const auto cranks = crank_violations(pv.values, solved->dy_EH);
            cand.violations[0] = cranks[0];
            cand.violations[1] = cranks[1];
            cand.violations[2] = order_ok(*fp_p, n_trace) ? 0.0 : 1000.0;
            const auto im = impact(*bt_primary, *fp_p);
            cand.theta1 = im.theta1;
            cand.theta2 = im.theta2;
            cand.violations[3] = 15.0 - im.theta1;
            cand.violations[4] = 15.0 - im.theta2;
            cand.violations[5] = cand.h_m_aux / 4.0 - cand.h_bar;
            const auto cp = crossing_probability(*layout_a, 25.0, 25.0, Gait::quad);
            cand.psi2 = cp.insufficient ? 0.0 : cp.psi2;
            cand.violations[6] = 20.0 - cand.psi2;

            double viol = 0.0;
            for (double v : cand.violations) viol += v > 0.0 ? v : 0.0;
            const double key[2] = {viol, cand.f1 + cand.f2};
            if (!ev.penalized &&
                !(key[0] < best_key[0] ||
                  (key[0] == best_key[0] && key[1] < best_key[1])))
                continue;
            best_key[0] = key[0];
            best_key[1] = key[1];
            if (auto rep = performance_report(*bt_primary, *fp_p)) cand.primary_report = *rep;
            if (auto rep = performance_report(*bt_aux, *fp_a)) cand.auxiliary_report = *rep;
            ev = std::move(cand);
        }
    }
    return ev;
}

StepwiseResult stepwise_optimize(const Targets& targets, const StepwiseConfig& cfg) {
    StepwiseResult result;
    result.extrapolation =
        !(std::abs(targets.h6 - 50.0) < 1e-9 && targets.h4 >= 220.0 && targets.h4 <= 300.0);

    const int n_trace = cfg.n_trace;

    moo::Problem stage1;
    stage1.dim = 13;
    stage1.n_objectives = 1;
    stage1.lower = lower_bounds();
    stage1.upper = upper_bounds();
    stage1.evaluate = [&, n_trace](std::span<const double> x) {
        const auto ev = evaluate_design(x, targets, n_trace);
        moo::Evaluation out;
        out.objectives = {ev.f2};
        out.violations.assign(ev.violations.begin(), ev.violations.begin() + 5);
        return out;
    };
    moo::AlgoConfig cfg1 = cfg.algo;
    cfg1.stop_thresholds.reset();  // stage 1 runs to its cap
    result.stage1 = moo::evolve(stage1, cfg1, &result.stats1);
    result.stage1.provenance = {"rtclm_stage1", result.stats1.generations_run, cfg1.seed};

    double best_f2 = moo::kPenalty;
    std::vector<std::vector<double>> seeds;
    {
        std::vector<const moo::Individual*> sorted;
        for (const auto& ind : result.stage1.individuals)
            if (ind.feasible()) sorted.push_back(&ind);
        std::sort(sorted.begin(), sorted.end(),
                  [](const moo::Individual* a, const moo::Individual* b) {
                      return a->objectives[0] != b->objectives[0]
                                 ? a->objectives[0] < b->objectives[0]
                                 : a->genome < b->genome;
                  });
        for (const auto* ind : sorted) {
            if (best_f2 > ind->objectives[0]) best_f2 = ind->objectives[0];
            seeds.push_back(ind->genome);
        }
    }
    if (seeds.empty()) {
        result.target_unreached = true;
        if (!result.stage1.individuals.empty()) {
            result.genome = result.stage1.individuals.front().genome;
            const auto ev = evaluate_design(result.genome, targets, n_trace);
            result.achieved_h6 = ev.h6;
            result.achieved_h4 = ev.h4;
            result.f1 = ev.f1;
            result.f2 = ev.f2;
            result.design = ev.design;
        }
        return result;
    }
    const double f2_bound = best_f2 + 0.5;

    moo::Problem stage2;
    stage2.dim = 13;
    stage2.n_objectives = 2;
    stage2.lower = lower_bounds();
    stage2.upper = upper_bounds();
    stage2.seeds = seeds;
    stage2.evaluate = [&, n_trace, f2_bound](std::span<const double> x) {
        const auto ev = evaluate_design(x, targets, n_trace);
        moo::Evaluation out;
        out.objectives = {ev.f1, ev.f2};
        out.violations.assign(ev.violations.begin(), ev.violations.end());
        out.violations.push_back(ev.f2 - f2_bound);
        return out;
    };
    moo::AlgoConfig cfg2 = cfg.algo;
    cfg2.seed = cfg.algo.seed + 1;
    cfg2.stop_thresholds = std::vector<double>{0.5, 0.5};
    result.stage2 = moo::evolve(stage2, cfg2, &result.stats2);
    result.stage2.provenance = {"rtclm_stage2", result.stats2.generations_run, cfg2.seed};
    result.reached_threshold = result.stats2.stopped_by_threshold;

    // Final pick: feasible members meeting the stop pair first, then small f1.
    const moo::Individual* chosen = nullptr;
    auto better = [](const moo::Individual* a, const moo::Individual* b) {
        const bool ta = a->objectives[0] < 0.5 && a->objectives[1] < 0.5;
        const bool tb = b->objectives[0] < 0.5 && b->objectives[1] < 0.5;
        if (ta != tb) return ta;
        if (a->objectives[0] != b->objectives[0]) return a->objectives[0] < b->objectives[0];
        if (a->objectives[1] != b->objectives[1]) return a->objectives[1] < b->objectives[1];
        return a->genome < b->genome;
    };
    for (const auto& ind : result.stage2.individuals) {
        if (!ind.feasible()) continue;
        if (!chosen || better(&ind, chosen)) chosen = &ind;
    }
    if (!chosen) {
        result.target_unreached = true;
        double best_viol = std::numeric_limits<double>::infinity();
        for (const auto& ind : result.stage2.individuals)
            if (ind.total_violation() < best_viol) {
                best_viol = ind.total_violation();
                chosen = &ind;
            }
    }
    if (chosen) {
        result.genome = chosen->genome;
        const auto ev = evaluate_design(result.genome, targets, n_trace);
        result.achieved_h6 = ev.h6;
        result.achieved_h4 = ev.h4;
        result.f1 = ev.f1;
        result.f2 = ev.f2;
        result.design = ev.design;
        if (!(ev.f1 < 0.5 && ev.f2 < 0.5)) result.target_unreached |= !result.reached_threshold;
    }
    return result;
}

}  // namespace clm::rtclm
