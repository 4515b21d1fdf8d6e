#pragma once

#include "flatcrit/exact.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace flatcrit {

/// Exact planar vector; components live in the surface field Q(sqrt(D)).
struct Vec2q {
    QuadNum x, y;

    Vec2q() = default;
    Vec2q(QuadNum px, QuadNum py) : x(std::move(px)), y(std::move(py)) {}

    Vec2q operator+(const Vec2q& o) const { return {x + o.x, y + o.y}; }
    Vec2q operator-(const Vec2q& o) const { return {x - o.x, y - o.y}; }
    Vec2q operator-() const { return {-x, -y}; }
    Vec2q operator*(const QuadNum& s) const { return {x * s, y * s}; }
    bool operator==(const Vec2q& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Vec2q& o) const { return !(*this == o); }

    bool is_zero() const { return x.is_zero() && y.is_zero(); }
    QuadNum norm2() const { return x * x + y * y; }
    Vec2q perp() const { return {-y, x}; }  // rotate +90 degrees

    double xd() const { return x.to_double(); }
    double yd() const { return y.to_double(); }
    double length() const { return std::sqrt(norm2().to_double()); }
};

inline QuadNum cross(const Vec2q& u, const Vec2q& v) { return u.x * v.y - u.y * v.x; }
inline QuadNum dot(const Vec2q& u, const Vec2q& v) { return u.x * v.x + u.y * v.y; }
inline int cross_sign(const Vec2q& u, const Vec2q& v) { return cross(u, v).sign(); }
inline int dot_sign(const Vec2q& u, const Vec2q& v) { return dot(u, v).sign(); }

/// Orientation of c relative to the directed line a -> b.
inline int orient(const Vec2q& a, const Vec2q& b, const Vec2q& c) {
    return cross_sign(b - a, c - a);
}

inline bool same_direction(const Vec2q& u, const Vec2q& v) {
    return cross_sign(u, v) == 0 && dot_sign(u, v) > 0;
}

/// 0 if the direction lies in the upper half-plane or on the positive x-axis.
inline int arg_half(const Vec2q& v) {
    int sy = v.y.sign();
    if (sy != 0) return sy > 0 ? 0 : 1;
    return v.x.sign() > 0 ? 0 : 1;
}

/// Exact comparison of directions by argument in [0, 2pi): -1, 0, +1.
inline int arg_cmp(const Vec2q& u, const Vec2q& v) {
    int hu = arg_half(u), hv = arg_half(v);
    if (hu != hv) return hu < hv ? -1 : 1;
    int c = cross_sign(u, v);
    return c > 0 ? -1 : (c < 0 ? 1 : 0);
}

/// Open cone of directions from `lo` counterclockwise to `hi`, spanning < pi.
struct Cone {
    Vec2q lo, hi;

    bool contains_strict(const Vec2q& d) const {
        return cross_sign(lo, d) > 0 && cross_sign(d, hi) > 0;
    }
    bool contains_closed(const Vec2q& d) const {
        return (cross_sign(lo, d) > 0 || same_direction(lo, d)) &&
               (cross_sign(d, hi) > 0 || same_direction(d, hi));
    }
    /// Intersection with another (< pi) cone; empty -> false. Valid whenever the
    /// two cones overlap in a region of angle < pi.
    bool intersect(const Cone& o, Cone& out) const {
        out.lo = cross_sign(lo, o.lo) > 0 ? o.lo : lo;
        out.hi = cross_sign(o.hi, hi) > 0 ? o.hi : hi;
        return cross_sign(out.lo, out.hi) > 0;
    }
};

struct Mat2d {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }
    std::array<double, 2> apply(double x, double y) const { return {a * x + b * y, c * x + d * y}; }
    std::array<double, 2> apply(const Vec2q& v) const { return apply(v.xd(), v.yd()); }
    Mat2d mul(const Mat2d& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    static Mat2d identity() { return {}; }
    static Mat2d geodesic(double t) { return {std::exp(-t), 0, 0, std::exp(t)}; }
    static Mat2d rotation(double theta) {
        double c0 = std::cos(theta), s0 = std::sin(theta);
        return {c0, -s0, s0, c0};
    }
    static Mat2d shear_h(double t) { return {1, t, 0, 1}; }
    static Mat2d shear_v(double s) { return {1, 0, s, 1}; }
};

struct Mat2q {
    QuadNum a, b, c, d;

    Mat2q() : a(1), b(0), c(0), d(1) {}
    Mat2q(QuadNum pa, QuadNum pb, QuadNum pc, QuadNum pd)
        : a(std::move(pa)), b(std::move(pb)), c(std::move(pc)), d(std::move(pd)) {}

    QuadNum det() const { return a * d - b * c; }
    Vec2q apply(const Vec2q& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2q mul(const Mat2q& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2q inverse() const {
        QuadNum dt = det();
        if (dt.is_zero()) throw Error("singular matrix");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    Mat2d to_double() const { return {a.to_double(), b.to_double(), c.to_double(), d.to_double()}; }
    bool is_identity() const {
        return (a - QuadNum(1)).is_zero() && b.is_zero() && c.is_zero() && (d - QuadNum(1)).is_zero();
    }
};

/// Exact signed area (shoelace / 2) of a polygon given by its vertex loop.
QuadNum polygon_area2(const std::vector<Vec2q>& verts);

/// Simplicity check by exhaustive exact segment intersection tests.
bool polygon_is_simple(const std::vector<Vec2q>& verts);

/// Convexity allowing collinear consecutive edges (interior angles <= pi).
bool polygon_is_convex(const std::vector<Vec2q>& verts);

/// Point strictly inside / on the boundary of a convex CCW polygon.
bool convex_contains(const std::vector<Vec2q>& verts, const Vec2q& p, bool strict);

/// Clip a convex CCW polygon by another (Sutherland-Hodgman, exact).
std::vector<Vec2q> convex_clip(const std::vector<Vec2q>& subject, const std::vector<Vec2q>& clip);

}  // namespace flatcrit
