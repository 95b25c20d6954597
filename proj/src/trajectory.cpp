#include "clm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clm {

namespace {

/// Central-difference y-slope sign at swing-arc position `k` (arc indices).
int dy_sign(const std::vector<double>& y, std::size_t k) {
    const double d = (k + 1 < y.size() ? y[k + 1] : y[k]) - (k > 0 ? y[k - 1] : y[k]);
    if (d > 0) return 1;
    if (d < 0) return -1;
    return 0;
}

}  // namespace

Fallible<FeaturePoints> find_feature_points(const Trajectory& bt) {
    const long n = static_cast<long>(bt.size());
    if (n < 64 || n % 2 != 0 || !bt.closed) return Fault{FaultKind::no_valid_pair};
    const long half = n / 2;

    // Landing/take-off pair.
    long best = -1;
    double best_dy = std::numeric_limits<double>::infinity();
    for (long i = 0; i < n; ++i) {
        const Vec2& a = bt.points[static_cast<std::size_t>(i)];
        const Vec2& b = bt.at_wrapped(i + half);
        if (!(a.x < b.x)) continue;
        const double dy = std::abs(a.y - b.y);
        if (dy < best_dy) {
            best_dy = dy;
            best = i;
        }
    }
    if (best < 0) return Fault{FaultKind::no_valid_pair};

    FeaturePoints fp;
    fp.t1 = {static_cast<int>(best), bt.points[static_cast<std::size_t>(best)]};
    const long i2 = (best + half) % n;
    fp.t2 = {static_cast<int>(i2), bt.points[static_cast<std::size_t>(i2)]};

    // Global extrema.
    long i3 = 0, i4 = 0, i5 = 0;
    for (long i = 1; i < n; ++i) {
        const Vec2& p = bt.points[static_cast<std::size_t>(i)];
        if (p.y < bt.points[static_cast<std::size_t>(i3)].y) i3 = i;
        if (p.x < bt.points[static_cast<std::size_t>(i4)].x) i4 = i;
        if (p.x > bt.points[static_cast<std::size_t>(i5)].x) i5 = i;
    }
    fp.t3 = {static_cast<int>(i3), bt.points[static_cast<std::size_t>(i3)]};
    fp.t4 = {static_cast<int>(i4), bt.points[static_cast<std::size_t>(i4)]};
    fp.t5 = {static_cast<int>(i5), bt.points[static_cast<std::size_t>(i5)]};

    // Swing-local extrema between t2 and t1 (forward order, open arc).
    std::vector<double> y;
    std::vector<long> idx;
    for (long k = 1; k < half; ++k) {
        const long i = (i2 + k) % n;
        idx.push_back(i);
        y.push_back(bt.points[static_cast<std::size_t>(i)].y);
    }
    std::vector<std::size_t> maxima, minima;
    int prev = 0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const int s = dy_sign(y, k);
        if (prev > 0 && s < 0) maxima.push_back(k);
        if (prev < 0 && s > 0) minima.push_back(k);
        if (s != 0) prev = s;
    }
    auto by_y_desc = [&](std::size_t a, std::size_t b) {
        return y[a] != y[b] ? y[a] > y[b] : a < b;
    };
    std::sort(maxima.begin(), maxima.end(), by_y_desc);
    if (maxima.size() >= 1) {
        std::size_t m1 = maxima[0];
        if (maxima.size() >= 2) {
            std::size_t m2 = maxima[1];
            if (m2 < m1) std::swap(m1, m2);  // chronological
            fp.t7 = Feature{static_cast<int>(idx[m1]), bt.points[static_cast<std::size_t>(idx[m1])]};
            fp.t8 = Feature{static_cast<int>(idx[m2]), bt.points[static_cast<std::size_t>(idx[m2])]};
            // Local lowest between the two humps.
            std::size_t best_min = y.size();
            for (std::size_t m : minima)
                if (m > m1 && m < m2 && (best_min == y.size() || y[m] < y[best_min])) best_min = m;
            if (best_min < y.size())
                fp.t6 = Feature{static_cast<int>(idx[best_min]),
                                bt.points[static_cast<std::size_t>(idx[best_min])]};
        } else {
            fp.t7 = Feature{static_cast<int>(idx[m1]), bt.points[static_cast<std::size_t>(idx[m1])]};
        }
    }
    return fp;
}

Fallible<Trajectory> bt_to_wt(const Trajectory& bt, const FeaturePoints& fp) {
    const long n = static_cast<long>(bt.size());
    if (n < 64 || n % 2 != 0) return Fault{FaultKind::no_valid_pair};
    const long half = n / 2;
    Trajectory wt;
    wt.period_T = bt.period_T;
    wt.closed = false;
    wt.points.reserve(static_cast<std::size_t>(half + 1));
    const Vec2 c1 = fp.t1.point;
    for (long k = 0; k <= half; ++k) {
        wt.points.push_back(bt.at_wrapped(fp.t2.index + k) - bt.at_wrapped(fp.t1.index + k) + c1);
    }
    return wt;
}

LegLayout LegLayout::coincident_quad() {
    LegLayout l;
    l.gait = Gait::quad;
    l.legs = {{"A", {0, 0}, 0.0}, {"B", {0, 0}, 0.5}, {"C", {0, 0}, 0.0}, {"D", {0, 0}, 0.5}};
    return l;
}

LegLayout LegLayout::coincident_biped() {
    LegLayout l;
    l.gait = Gait::biped;
    l.legs = {{"A", {0, 0}, 0.0}, {"B", {0, 0}, 0.5}};
    return l;
}

Fallible<MultiWt> multi_wt_layout(const Trajectory& bt, const FeaturePoints& fp,
                                  const LegLayout& layout) {
    auto wt = bt_to_wt(bt, fp);
    if (!wt) return wt.fault();

    MultiWt out;
    // Take-off-anchored coordinates: x~ = x - x_b(t2).
    const double x1 = fp.t1.point.x - fp.t2.point.x;
    const double x2 = 0.0;
    out.stride = 2.0 * std::abs(fp.t2.point.x - fp.t1.point.x);

    auto origin = [&](std::size_t i) {
        return i < layout.legs.size() ? layout.legs[i].origin : Vec2{0, 0};
    };
    out.dx_ab = (2.0 * x1 + origin(1).x) - (x2 + origin(0).x);
    out.dx_bc = (x2 + origin(2).x) - (2.0 * x1 + origin(1).x);
    out.dx_cd = (2.0 * x1 + origin(3).x) - (x2 + origin(2).x);

    // Legs tile the stride: a leg phased by p starts its swing p*T later, by
    // which time the pattern has advanced p * (step displacement).
    const double step_dx = 2.0 * x1;  // signed step displacement per period
    const Vec2 rebase = fp.t2.point;
    for (const auto& leg : layout.legs) {
        Trajectory placed = *wt;
        const Vec2 shift = Vec2{leg.phase * step_dx, 0.0} + leg.origin - rebase;
        for (auto& p : placed.points) p += shift;
        out.positioned.push_back(std::move(placed));
    }
    return out;
}

Trajectory resample_closed(const Trajectory& t, int n) {
    Trajectory out;
    out.period_T = t.period_T;
    out.closed = true;
    out.points.reserve(static_cast<std::size_t>(n));
    const double step = static_cast<double>(t.size()) / n;
    for (int k = 0; k < n; ++k) {
        const double u = step * k;
        const long i = static_cast<long>(std::floor(u));
        const double f = u - i;
        const Vec2& a = t.at_wrapped(i);
        const Vec2& b = t.at_wrapped(i + 1);
        out.points.push_back(a * (1.0 - f) + b * f);
    }
    return out;
}

Trajectory rotate_start(const Trajectory& t, int new_origin) {
    Trajectory out = t;
    const long n = static_cast<long>(t.size());
    for (long k = 0; k < n; ++k) out.points[static_cast<std::size_t>(k)] = t.at_wrapped(new_origin + k);
    out.phase_origin = 0;
    return out;
}

Trajectory translate(const Trajectory& t, const Vec2& d) {
    Trajectory out = t;
    for (auto& p : out.points) p += d;
    return out;
}

Trajectory scale(const Trajectory& t, double s) {
    Trajectory out = t;
    for (auto& p : out.points) p = p * s;
    return out;
}

}  // namespace clm
