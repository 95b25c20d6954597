#include "clm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace clm {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

Vec2 central_velocity(const Trajectory& t, long i) {
    const double dt = t.period_T / static_cast<double>(t.size());
    return (t.at_wrapped(i + 1) - t.at_wrapped(i - 1)) / (2.0 * dt);
}

double slope_angle_deg(const Trajectory& t, long i) {
    const Vec2 d = t.at_wrapped(i + 1) - t.at_wrapped(i - 1);
    if (d.x == 0.0 && d.y == 0.0) return 0.0;
    return std::atan(std::abs(d.y / d.x)) * 180.0 / std::numbers::pi;
}

/// x-coordinates where the polyline crosses y = b, ascending x. Vertices
/// exactly on the line count once.
std::vector<double> level_crossings(const Trajectory& wt, double b) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < wt.size(); ++i) {
        const Vec2& p = wt.points[i];
        if (p.y == b) {
            if (xs.empty() || std::abs(xs.back() - p.x) > 1e-12) xs.push_back(p.x);
            continue;
        }
        if (i + 1 >= wt.size()) break;
        const Vec2& q = wt.points[i + 1];
        if ((p.y - b) * (q.y - b) < 0.0) {
            const double f = (b - p.y) / (q.y - p.y);
            xs.push_back(p.x + f * (q.x - p.x));
        }
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

}  // namespace

Fallible<StanceMetrics> stance_metrics(const Trajectory& bt, const FeaturePoints& fp) {
    StanceMetrics m;
    m.l_s = std::abs(fp.t2.point.x - fp.t1.point.x);
    if (m.l_s < 1e-9) return Fault{FaultKind::zero_stance_length};
    const long n = static_cast<long>(bt.size());
    const long len = ((fp.t2.index - fp.t1.index) % n + n) % n;
    double ymin = fp.t1.point.y;
    for (long k = 0; k <= len; ++k) ymin = std::min(ymin, bt.at_wrapped(fp.t1.index + k).y);
    m.h_s = fp.t1.point.y - ymin;
    m.S = 100.0 * m.h_s / m.l_s;
    return m;
}

ImpactMetrics impact(const Trajectory& bt, const FeaturePoints& fp) {
    ImpactMetrics m;
    m.theta1 = slope_angle_deg(bt, fp.t1.index);
    m.theta2 = slope_angle_deg(bt, fp.t2.index);
    const double speed = norm(central_velocity(bt, fp.t1.index));
    m.I = speed * std::sin(m.theta1 * std::numbers::pi / 180.0);
    return m;
}

CrossingStats crossing_stats(const Trajectory& wt) {
    CrossingStats s;
    if (wt.size() < 2) return s;
    double ymax = wt.points[0].y, ymin = wt.points[0].y;
    double integral = 0.0;
    const double dt = wt.period_T / static_cast<double>(2 * (wt.size() - 1));  // span T/2
    for (std::size_t i = 0; i < wt.size(); ++i) {
        ymax = std::max(ymax, wt.points[i].y);
        ymin = std::min(ymin, wt.points[i].y);
        const double w = (i == 0 || i + 1 == wt.size()) ? 0.5 : 1.0;
        integral += w * wt.points[i].y * dt;
    }
    s.h_m = ymax;
    s.h_bar = 2.0 / wt.period_T * integral - ymin;
    return s;
}

CrossingProbability crossing_probability(const MultiWt& wts, double a, double b, Gait gait) {
    CrossingProbability r;
    const double l = wts.stride;
    if (l <= 0.0) {
        r.insufficient = true;
        return r;
    }
    const std::size_t legs = gait == Gait::quad ? 4 : 2;
    // One clearance interval per leg that comes down to the line; a leg whose
    // curve stays strictly above y = b forbids nothing.
    std::vector<std::pair<double, double>> intervals;
    for (std::size_t k = 0; k < legs && k < wts.positioned.size(); ++k) {
        const auto& leg = wts.positioned[k];
        auto xs = level_crossings(leg, b);
        if (xs.size() >= 2) {
            intervals.push_back({xs.front(), xs.back()});
            continue;
        }
        double ymax = leg.points.empty() ? 0.0 : leg.points[0].y;
        for (const auto& p : leg.points) ymax = std::max(ymax, p.y);
        if (ymax <= b) {
            r.insufficient = true;  // this leg never clears height b
            return r;
        }
    }
    std::sort(intervals.begin(), intervals.end());
    const std::size_t k = intervals.size();
    double forbidden = 0.0, widths = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        widths += intervals[j].second - intervals[j].first;
        // For the quad pattern the first inter-interval gap lies between the
        // paired same-phase legs and stays admissible; a biped has only the
        // one gap and it is forbidden.
        const bool count_gap = j + 1 < k && (gait == Gait::biped || j >= 1);
        if (count_gap) forbidden += std::max(0.0, intervals[j + 1].first - intervals[j].second);
    }
    const double margin = static_cast<double>(k) * a;
    const double psi2 = (l - forbidden - margin) / l;
    const double psi4 = (widths - margin) / l;
    r.clamped = psi2 < 0.0 || psi2 > 1.0 || psi4 < 0.0 || psi4 > 1.0;
    r.psi2 = std::clamp(psi2, 0.0, 1.0) * 100.0;
    r.psi4 = std::clamp(psi4, 0.0, 1.0) * 100.0;
    return r;
}

double mse_aligned(const Trajectory& candidate, int candidate_t2, const Trajectory& target,
                   int target_t2) {
    const long n = static_cast<long>(candidate.size());
    const long shift = candidate_t2 - target_t2;
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += dist(candidate.at_wrapped(i + shift), target.at_wrapped(i));
    return sum / static_cast<double>(n);
}

Fallible<double> mse(const Trajectory& candidate, const Trajectory& target) {
    if (candidate.size() != target.size()) return Fault{FaultKind::length_mismatch};
    auto fc = find_feature_points(candidate);
    auto ft = find_feature_points(target);
    if (!fc) return fc.fault();
    if (!ft) return ft.fault();
    return mse_aligned(candidate, fc->t2.index, target, ft->t2.index);
}

double fourier_distance(const Trajectory& candidate, const Trajectory& target, int n_harmonics) {
    using cd = std::complex<double>;
    const int m = std::max(3, n_harmonics);

    auto descriptor = [m](const Trajectory& t) {
        const std::size_t n = t.size();
        std::vector<cd> c(static_cast<std::size_t>(2 * m + 1));
        for (int h = -m; h <= m; ++h) {
            cd acc{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k) {
                const double ph = -kTau * h * static_cast<double>(k) / static_cast<double>(n);
                acc += cd(t.points[k].x, t.points[k].y) * std::polar(1.0, ph);
            }
            c[static_cast<std::size_t>(h + m)] = acc / static_cast<double>(n);
        }
        c[static_cast<std::size_t>(m)] = 0.0;  // drop DC: translation invariance
        double energy = 0.0;
        for (const cd& v : c) energy += std::norm(v);
        const double scale = std::sqrt(energy);
        if (scale > 0.0)
            for (cd& v : c) v /= scale;
        // Rotation/start normalization from the phases of c(+1), c(-1).
        const cd c1 = c[static_cast<std::size_t>(m + 1)];
        const cd cm1 = c[static_cast<std::size_t>(m - 1)];
        double alpha = 0.0, omega = 0.0;
        if (std::abs(c1) > 1e-12 && std::abs(cm1) > 1e-12) {
            alpha = -(std::arg(c1) + std::arg(cm1)) / 2.0;
            omega = (std::arg(c1) - std::arg(cm1)) / 2.0;
        } else if (std::abs(c1) > 1e-12) {
            alpha = -std::arg(c1);
        } else if (std::abs(cm1) > 1e-12) {
            alpha = -std::arg(cm1);
        }
        std::vector<cd> out(c.size());
        for (int h = -m; h <= m; ++h)
            out[static_cast<std::size_t>(h + m)] =
                c[static_cast<std::size_t>(h + m)] * std::polar(1.0, alpha - h * omega);
        return out;
    };

    const auto a = descriptor(candidate);
    const auto b = descriptor(target);
    // The (alpha, omega) normalization leaves a two-fold ambiguity
    // (alpha + pi, omega + pi); take the better of the two.
    double d_plain = 0.0, d_alt = 0.0;
    for (int h = -m; h <= m; ++h) {
        const std::size_t i = static_cast<std::size_t>(h + m);
        const cd alt = b[i] * std::polar(1.0, std::numbers::pi * (1.0 - h));
        d_plain += std::norm(a[i] - b[i]);
        d_alt += std::norm(a[i] - alt);
    }
    return std::sqrt(std::min(d_plain, d_alt));
}

Fallible<PerformanceReport> performance_report(const Trajectory& bt, const FeaturePoints& fp,
                                               Gait gait, double obstacle_a, double obstacle_b) {
    PerformanceReport rep;
    auto sm = stance_metrics(bt, fp);
    if (!sm) return sm.fault();
    rep.h_s = sm->h_s;
    rep.l_s = sm->l_s;
    rep.S = sm->S;
    const auto im = impact(bt, fp);
    rep.I = im.I;
    rep.theta1 = im.theta1;
    rep.theta2 = im.theta2;
    auto wt = bt_to_wt(bt, fp);
    if (!wt) return wt.fault();
    const auto cs = crossing_stats(*wt);
    rep.h_m = cs.h_m;
    rep.h_bar = cs.h_bar;
    rep.l_w = std::abs(wt->points.back().x - wt->points.front().x);
    auto layout = gait == Gait::quad ? LegLayout::coincident_quad() : LegLayout::coincident_biped();
    auto mw = multi_wt_layout(bt, fp, layout);
    if (mw) {
        const auto cp = crossing_probability(*mw, obstacle_a, obstacle_b, gait);
        rep.psi2 = cp.psi2;
        rep.psi4 = cp.psi4;
    }
    return rep;
}

}  // namespace clm
