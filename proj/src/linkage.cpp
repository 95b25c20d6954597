#include "clm/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace clm {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

std::vector<std::string> make_sixbar_names() {
    std::vector<std::string> n{"b", "g", "x_a", "y_a"};
    for (int i = 1; i <= 12; ++i) n.push_back("r" + std::to_string(i));
    return n;
}

std::vector<std::string> make_fourbar_names() {
    std::vector<std::string> n{"b", "g", "x_a", "y_a"};
    for (int i = 1; i <= 6; ++i) n.push_back("r" + std::to_string(i));
    return n;
}

std::vector<std::string> make_rtclm_names() {
    std::vector<std::string> n;
    for (int i = 1; i <= 6; ++i) n.push_back("r" + std::to_string(i));
    n.insert(n.end(), {"x_d", "y_d", "a1", "b1", "a3", "b3", "dx_EH"});
    return n;
}

}  // namespace

const char* topology_name(Topology t) {
    switch (t) {
        case Topology::four_bar: return "four_bar";
        case Topology::watt1: return "watt1";
        case Topology::stephenson1: return "stephenson1";
        case Topology::stephenson3: return "stephenson3";
        case Topology::rtclm_seven_bar: return "rtclm_seven_bar";
    }
    return "?";
}

Fallible<Topology> topology_from_name(const std::string& name) {
    for (Topology t : {Topology::four_bar, Topology::watt1, Topology::stephenson1,
                       Topology::stephenson3, Topology::rtclm_seven_bar}) {
        if (name == topology_name(t)) return t;
    }
    return Fault{FaultKind::out_of_range};
}

std::size_t topology_arity(Topology t) {
    switch (t) {
        case Topology::four_bar: return 10;
        case Topology::watt1:
        case Topology::stephenson1:
        case Topology::stephenson3: return 16;
        case Topology::rtclm_seven_bar: return 13;
    }
    return 0;
}

const std::vector<std::string>& topology_param_names(Topology t) {
    static const std::vector<std::string> six = make_sixbar_names();
    static const std::vector<std::string> four = make_fourbar_names();
    static const std::vector<std::string> seven = make_rtclm_names();
    switch (t) {
        case Topology::four_bar: return four;
        case Topology::rtclm_seven_bar: return seven;
        default: return six;
    }
}

const std::vector<bool>& topology_positive_required(Topology t) {
    // Six-bars: strict lengths are r1..r4 (crank, ground, first dyad) and
    // r9, r10 (second dyad). r5..r8, r11, r12 are signed local offsets.
    static const std::vector<bool> six = [] {
        std::vector<bool> v(16, false);
        for (std::size_t r : {1, 2, 3, 4, 9, 10}) v[sixbar::r(r)] = true;
        return v;
    }();
    // Four-bar: r1..r4 lengths, r5/r6 the signed coupler-point offsets.
    static const std::vector<bool> four = [] {
        std::vector<bool> v(10, false);
        for (std::size_t r : {1, 2, 3, 4}) v[sixbar::r(r)] = true;
        return v;
    }();
    // RTCLM: link lengths r1..r6 and the triangle sides a1,b1,a3,b3.
    static const std::vector<bool> seven = [] {
        std::vector<bool> v(13, false);
        for (std::size_t i : {0, 1, 2, 3, 4, 5, 8, 9, 10, 11}) v[i] = true;
        return v;
    }();
    switch (t) {
        case Topology::four_bar: return four;
        case Topology::rtclm_seven_bar: return seven;
        default: return six;
    }
}

const std::vector<bool>& topology_length_dimension(Topology t) {
    static const std::vector<bool> six = [] {
        std::vector<bool> v(16, true);
        v[sixbar::b] = v[sixbar::g] = false;
        return v;
    }();
    static const std::vector<bool> four = [] {
        std::vector<bool> v(10, true);
        v[sixbar::b] = v[sixbar::g] = false;
        return v;
    }();
    static const std::vector<bool> seven(13, true);
    switch (t) {
        case Topology::four_bar: return four;
        case Topology::rtclm_seven_bar: return seven;
        default: return six;
    }
}

std::optional<std::string> ParamVector::invalid_reason() const {
    if (!arity_ok())
        return "expected " + std::to_string(topology_arity(topology)) + " parameters, got " +
               std::to_string(values.size());
    const auto& pos = topology_positive_required(topology);
    const auto& names = topology_param_names(topology);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) return names[i] + " is not finite";
        if (pos[i] && values[i] <= 0.0) return names[i] + " must be > 0";
    }
    return std::nullopt;
}

Fallible<Vec2> solve_dyad_rrr(const Vec2& p1, const Vec2& p2, double l1, double l2, int branch) {
    const Vec2 d = p2 - p1;
    const double dn = norm(d);
    const double scale = std::max({dn, l1, l2});
    if (dn < 1e-12 * std::max(1.0, scale)) return Fault{FaultKind::degenerate_dyad};

    const double a = (dn * dn + l1 * l1 - l2 * l2) / (2.0 * dn);
    double h2 = l1 * l1 - a * a;
    if (h2 < 0.0) {
        // Tangent circles land a hair negative in floating point.
        if (h2 > -1e-12 * scale * scale) h2 = 0.0;
        else return Fault{FaultKind::loop_defect};
    }
    const Vec2 u = d / dn;
    return p1 + u * a + perp(u) * (branch >= 0 ? 1.0 : -1.0) * std::sqrt(h2);
}

Vec2 link_point(const Vec2& p, const Vec2& q, double along, double pperp) {
    const Vec2 u = (q - p) / dist(p, q);
    return p + u * along + perp(u) * pperp;
}

Fallible<Vec2> triangle_point(const Vec2& p, const Vec2& q, double da, double db, int side) {
    return solve_dyad_rrr(p, q, da, db, side);
}

bool crank_condition_holds(double r_crank, double o1, double o2, double o3) {
    return r_crank + 2.0 * std::max({o1, o2, o3}) < o1 + o2 + o3;
}

namespace {

struct SixBarPose {
    Vec2 A, B, C, D, E, H, F;
};

Fault at_angle(Fault f, double angle) {
    f.angle = angle;
    return f;
}

Fallible<SixBarPose> solve_sixbar(const ParamVector& p, double theta, Branches br) {
    using namespace sixbar;
    const auto& v = p.values;
    SixBarPose s;
    s.A = {v[xa], v[ya]};
    s.D = s.A + polar(v[r(2)], v[g]);
    s.B = s.A + polar(v[r(1)], theta + v[b]);
    auto c = solve_dyad_rrr(s.B, s.D, v[r(3)], v[r(4)], br.dyad1);
    if (!c) return at_angle(c.fault(), theta);
    s.C = *c;
    switch (p.topology) {
        case Topology::watt1:
            s.E = link_point(s.B, s.C, v[r(5)], v[r(6)]);
            s.H = link_point(s.D, s.C, v[r(7)], v[r(8)]);
            break;
        case Topology::stephenson1:
            s.E = link_point(s.A, s.B, v[r(5)], v[r(6)]);
            s.H = link_point(s.D, s.C, v[r(7)], v[r(8)]);
            break;
        case Topology::stephenson3:
            s.E = link_point(s.B, s.C, v[r(5)], v[r(6)]);
            s.H = link_point(s.A, s.D, v[r(7)], v[r(8)]);
            break;
        default:
            return Fault{FaultKind::out_of_range};
    }
    auto f = solve_dyad_rrr(s.E, s.H, v[r(9)], v[r(10)], br.dyad2);
    if (!f) return at_angle(f.fault(), theta);
    s.F = *f;
    return s;
}

}  // namespace

Fallible<Pose> forward_kinematics(const ParamVector& p, double theta, Branches br) {
    using namespace sixbar;
    const auto& v = p.values;
    Pose pose;
    pose.crank_angle = theta;
    pose.branches = br;

    if (p.topology == Topology::four_bar) {
        const Vec2 A{v[xa], v[ya]};
        const Vec2 D = A + polar(v[r(2)], v[g]);
        const Vec2 B = A + polar(v[r(1)], theta + v[b]);
        auto c = solve_dyad_rrr(B, D, v[r(3)], v[r(4)], br.dyad1);
        if (!c) return at_angle(c.fault(), theta);
        pose.joints = {A, B, *c, D};
        pose.foot = link_point(B, *c, v[r(5)], v[r(6)]);
        return pose;
    }
    if (p.topology == Topology::rtclm_seven_bar) return Fault{FaultKind::out_of_range};

    auto s = solve_sixbar(p, theta, br);
    if (!s) return s.fault();
    pose.joints = {s->A, s->B, s->C, s->D, s->E, s->H, s->F};
    pose.foot = link_point(s->E, s->F, v[r(12)], v[r(11)]);
    return pose;
}

std::vector<double> closure_residuals(const ParamVector& p, const Pose& pose) {
    using namespace sixbar;
    const auto& v = p.values;
    std::vector<double> res;
    if (p.topology == Topology::four_bar) {
        const Vec2 &A = pose.joints[0], &B = pose.joints[1], &C = pose.joints[2],
                   &D = pose.joints[3];
        res = {std::abs(dist(A, B) - v[r(1)]), std::abs(dist(A, D) - v[r(2)]),
               std::abs(dist(B, C) - v[r(3)]), std::abs(dist(D, C) - v[r(4)])};
        res.push_back(dist(pose.foot, link_point(B, C, v[r(5)], v[r(6)])));
        return res;
    }
    const Vec2 &A = pose.joints[0], &B = pose.joints[1], &C = pose.joints[2], &D = pose.joints[3],
               &E = pose.joints[4], &H = pose.joints[5], &F = pose.joints[6];
    res = {std::abs(dist(A, B) - v[r(1)]), std::abs(dist(A, D) - v[r(2)]),
           std::abs(dist(B, C) - v[r(3)]), std::abs(dist(D, C) - v[r(4)]),
           std::abs(dist(E, F) - v[r(9)]), std::abs(dist(H, F) - v[r(10)])};
    switch (p.topology) {
        case Topology::watt1:
            res.push_back(dist(E, link_point(B, C, v[r(5)], v[r(6)])));
            res.push_back(dist(H, link_point(D, C, v[r(7)], v[r(8)])));
            break;
        case Topology::stephenson1:
            res.push_back(dist(E, link_point(A, B, v[r(5)], v[r(6)])));
            res.push_back(dist(H, link_point(D, C, v[r(7)], v[r(8)])));
            break;
        case Topology::stephenson3:
            res.push_back(dist(E, link_point(B, C, v[r(5)], v[r(6)])));
            res.push_back(dist(H, link_point(A, D, v[r(7)], v[r(8)])));
            break;
        default: break;
    }
    res.push_back(dist(pose.foot, link_point(E, F, v[r(12)], v[r(11)])));
    return res;
}

DefectReport check_crank_defect(const ParamVector& p) {
    using namespace sixbar;
    const auto& v = p.values;
    DefectReport rep;
    if (p.topology == Topology::rtclm_seven_bar) {
        const double d1 = std::hypot(v[6], v[7]);  // x_d, y_d
        rep.has_crank_defect = !crank_condition_holds(v[0], v[1], v[2], d1);
        return rep;
    }
    rep.has_crank_defect = !crank_condition_holds(v[r(1)], v[r(2)], v[r(3)], v[r(4)]);
    return rep;
}

double mechanism_scale(const ParamVector& p) {
    const auto& lens = topology_length_dimension(p.topology);
    double s = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i)
        if (lens[i]) s += std::abs(p.values[i]);
    return s;
}

Fallible<Trajectory> trace_bt(const ParamVector& p, int n, Branches br, TraceOptions opt) {
    Trajectory t;
    t.period_T = opt.period_T;
    t.closed = true;
    t.points.reserve(static_cast<std::size_t>(n));
    const double jump_limit = 0.2 * mechanism_scale(p);
    Vec2 prev;
    for (int k = 0; k < n; ++k) {
        const double theta = opt.direction * kTau * k / n;
        auto pose = forward_kinematics(p, theta, br);
        if (!pose) return pose.fault();
        if (k > 0 && dist(pose->foot, prev) > jump_limit)
            return Fault{FaultKind::branch_discontinuity, theta};
        prev = pose->foot;
        t.points.push_back(pose->foot);
    }
    if (dist(t.points.front(), t.points.back()) > jump_limit)
        return Fault{FaultKind::branch_discontinuity, 0.0};
    return t;
}

DefectReport sweep_defects(const ParamVector& p, int n, Branches br) {
    DefectReport rep = check_crank_defect(p);
    for (int k = 0; k < n; ++k) {
        const double theta = kTau * k / n;
        auto pose = forward_kinematics(p, theta, br);
        if (!pose) {
            rep.has_loop_defect = true;
            rep.first_failing_angle = theta;
            return rep;
        }
    }
    auto traced = trace_bt(p, n, br);
    if (!traced && traced.fault().kind == FaultKind::branch_discontinuity) {
        rep.has_branch_defect = true;
        rep.first_failing_angle = traced.fault().angle;
    }
    return rep;
}

}  // namespace clm
