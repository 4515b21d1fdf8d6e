#include "flatcrit/geom.hpp"

namespace flatcrit {

QuadNum polygon_area2(const std::vector<Vec2q>& verts) {
    QuadNum s(0);
    size_t n = verts.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2q& p = verts[i];
        const Vec2q& q = verts[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return s / QuadNum(2);
}

namespace {

bool on_segment(const Vec2q& a, const Vec2q& b, const Vec2q& p) {
    if (orient(a, b, p) != 0) return false;
    return dot_sign(p - a, b - a) >= 0 && dot_sign(p - b, a - b) >= 0;
}

// Proper or improper intersection of closed segments ab and cd.
bool segments_intersect(const Vec2q& a, const Vec2q& b, const Vec2q& c, const Vec2q& d) {
    int o1 = orient(a, b, c), o2 = orient(a, b, d);
    int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) {
        if (o1 != 0 || o2 != 0) return true;
    }
    return on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b);
}

}  // namespace

bool polygon_is_simple(const std::vector<Vec2q>& verts) {
    size_t n = verts.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i)
        if (verts[i] == verts[(i + 1) % n]) return false;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            const Vec2q& a = verts[i];
            const Vec2q& b = verts[(i + 1) % n];
            const Vec2q& c = verts[j];
            const Vec2q& d = verts[(j + 1) % n];
            if (adjacent) {
                // Shared endpoint only; otherwise the edges fold back.
                const Vec2q& shared = (j == i + 1) ? b : a;
                const Vec2q& e1 = (j == i + 1) ? a : b;
                const Vec2q& e2 = (j == i + 1) ? d : c;
                if (cross_sign(e1 - shared, e2 - shared) == 0 &&
                    dot_sign(e1 - shared, e2 - shared) > 0)
                    return false;
                continue;
            }
            if (segments_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

bool polygon_is_convex(const std::vector<Vec2q>& verts) {
    size_t n = verts.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        const Vec2q& a = verts[i];
        const Vec2q& b = verts[(i + 1) % n];
        const Vec2q& c = verts[(i + 2) % n];
        if (cross_sign(b - a, c - b) < 0) return false;
    }
    return true;
}

bool convex_contains(const std::vector<Vec2q>& verts, const Vec2q& p, bool strict) {
    size_t n = verts.size();
    for (size_t i = 0; i < n; ++i) {
        int o = orient(verts[i], verts[(i + 1) % n], p);
        if (o < 0 || (strict && o == 0)) return false;
    }
    return true;
}

std::vector<Vec2q> convex_clip(const std::vector<Vec2q>& subject, const std::vector<Vec2q>& clip) {
    std::vector<Vec2q> poly = subject;
    size_t m = clip.size();
    for (size_t i = 0; i < m && !poly.empty(); ++i) {
        const Vec2q& ca = clip[i];
        const Vec2q& cb = clip[(i + 1) % m];
        Vec2q dir = cb - ca;
        if (dir.is_zero()) continue;
        std::vector<Vec2q> next;
        size_t n = poly.size();
        for (size_t j = 0; j < n; ++j) {
            const Vec2q& p = poly[j];
            const Vec2q& q = poly[(j + 1) % n];
            int sp = cross_sign(dir, p - ca);
            int sq = cross_sign(dir, q - ca);
            if (sp >= 0) next.push_back(p);
            if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
                // Exact crossing point of pq with the clip line.
                QuadNum t = cross(dir, ca - p) / cross(dir, q - p);
                next.push_back(p + (q - p) * t);
            }
        }
        poly = std::move(next);
    }
    // Drop duplicate consecutive vertices left by tangential clips.
    std::vector<Vec2q> out;
    for (const auto& v : poly)
        if (out.empty() || !(out.back() == v)) out.push_back(v);
    if (out.size() > 1 && out.front() == out.back()) out.pop_back();
    if (out.size() < 3) out.clear();
    return out;
}

}  // namespace flatcrit
