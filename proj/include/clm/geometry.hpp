#pragma once

#include <cmath>

namespace clm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double norm_sq(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

/// Unit vector at angle `a` (rad).
inline Vec2 polar(double r, double a) { return {r * std::cos(a), r * std::sin(a)}; }

/// Counter-clockwise perpendicular.
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline Vec2 rotate(const Vec2& v, double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Rigid planar frame given by an origin and the direction of its x-axis.
struct Frame2 {
    Vec2 origin;
    Vec2 xhat;  // unit

    Vec2 to_world(const Vec2& local) const {
        return origin + xhat * local.x + perp(xhat) * local.y;
    }
    Vec2 to_local(const Vec2& world) const {
        const Vec2 d = world - origin;
        return {dot(d, xhat), dot(d, perp(xhat))};
    }
};

/// Frame with origin `p` and x-axis toward `q`.
inline Frame2 frame_through(const Vec2& p, const Vec2& q) {
    const Vec2 d = q - p;
    const double n = norm(d);
    return {p, d / n};
}

}  // namespace clm
