#include "flatcrit/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace flatcrit {

namespace {

constexpr size_t kNodeBudget = 4'000'000;

struct DevNode {
    int poly = -1;
    Vec2q shift;        // base vertex v develops to v + shift
    Cone cone;          // strict sheet of directions (ignored when full)
    bool full = false;  // root around an interior source: all directions
    int parent = -1;
    int entry_edge = -1;
};

struct RegionTest {
    const UnfoldRegion& g;
    bool has_rect;
    double slack = 1e-9;

    explicit RegionTest(const UnfoldRegion& region)
        : g(region), has_rect(std::isfinite(region.xbound) || std::isfinite(region.ybound)) {}

    std::array<double, 2> map(const Vec2q& p) const { return g.metric.apply(p); }

    double min_dist_segment(const Vec2q& a, const Vec2q& b) const {
        auto pa = map(a), pb = map(b);
        double vx = pb[0] - pa[0], vy = pb[1] - pa[1];
        double vv = vx * vx + vy * vy;
        double t = vv > 0 ? -(pa[0] * vx + pa[1] * vy) / vv : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return std::hypot(pa[0] + t * vx, pa[1] + t * vy);
    }

    // May anything beyond the gate segment, inside the cone, still meet the
    // region? Conservative within the slack.
    bool beyond_gate_may_hit(const Vec2q& ga, const Vec2q& gb, const Cone& cone) const {
        if (min_dist_segment(ga, gb) > g.radius * (1 + slack)) return false;
        if (!has_rect) return true;
        double xb = std::min(g.xbound, g.radius), yb = std::min(g.ybound, g.radius);
        std::vector<std::array<double, 2>> poly = {{-xb, -yb}, {xb, -yb}, {xb, yb}, {-xb, yb}};
        double scale = std::max({1.0, xb, yb});
        auto clip_halfplane = [&](double nx, double ny, double c) {
            // keep points with nx*x + ny*y <= c
            std::vector<std::array<double, 2>> next;
            size_t n = poly.size();
            for (size_t i = 0; i < n && !poly.empty(); ++i) {
                auto p = poly[i], q = poly[(i + 1) % n];
                double fp = nx * p[0] + ny * p[1] - c;
                double fq = nx * q[0] + ny * q[1] - c;
                if (fp <= 0) next.push_back(p);
                if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
                    double t = fp / (fp - fq);
                    next.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
                }
            }
            poly = std::move(next);
        };
        // inside the cone: cross(lo, p) >= 0  <=>  -lo_y*x + lo_x*y >= 0
        auto lo = map(cone.lo), hi = map(cone.hi);
        clip_halfplane(lo[1], -lo[0], slack * scale * std::hypot(lo[0], lo[1]));
        clip_halfplane(-hi[1], hi[0], slack * scale * std::hypot(hi[0], hi[1]));
        // beyond the gate line, away from the origin
        auto pa = map(ga), pb = map(gb);
        double ex = pb[0] - pa[0], ey = pb[1] - pa[1];
        double nx = -ey, ny = ex;
        double c = nx * pa[0] + ny * pa[1];
        double eps = slack * scale * std::hypot(ex, ey);
        if (c > 0) clip_halfplane(-nx, -ny, -c + eps);  // origin has value 0 < c: keep >= c side
        else clip_halfplane(nx, ny, c + eps);
        return !poly.empty();
    }

    bool point_may_hit(const Vec2q& p) const {
        auto q = map(p);
        double r = std::hypot(q[0], q[1]);
        if (r > g.radius * (1 + slack)) return false;
        if (has_rect &&
            (std::abs(q[0]) > g.xbound * (1 + slack) || std::abs(q[1]) > g.ybound * (1 + slack)))
            return false;
        return true;
    }
};

// Cone of directions through the open developed segment (a, b) seen from the
// origin; empty when collinear with the origin.
bool gate_cone(const Vec2q& a, const Vec2q& b, Cone& out) {
    int cs = cross_sign(a, b);
    if (cs == 0) return false;
    if (cs > 0) out = {a, b};
    else out = {b, a};
    return true;
}

template <typename Visit>
void run_unfold(const TranslationSurface& s, std::vector<DevNode> roots,
                const UnfoldRegion& region, bool* truncated, Visit&& visit) {
    RegionTest test(region);
    std::vector<DevNode> pool = std::move(roots);
    std::deque<size_t> queue;
    for (size_t i = 0; i < pool.size(); ++i) {
        visit(pool[i], pool);
        queue.push_back(i);
    }
    while (!queue.empty()) {
        size_t idx = queue.front();
        queue.pop_front();
        DevNode node = pool[idx];  // copy: pool may reallocate
        int ne = s.num_edges(node.poly);
        for (int e = 0; e < ne; ++e) {
            if (e == node.entry_edge) continue;
            Vec2q a = s.vertex(node.poly, e) + node.shift;
            Vec2q b = s.vertex(node.poly, (e + 1) % ne) + node.shift;
            Cone gate;
            if (!gate_cone(a, b, gate)) continue;
            Cone next_cone;
            if (node.full) next_cone = gate;
            else if (!node.cone.intersect(gate, next_cone)) continue;
            if (!test.beyond_gate_may_hit(a, b, next_cone)) continue;
            if (!s.edge_is_glued(node.poly, e)) {
                if (truncated && s.edge_is_boundary(node.poly, e)) *truncated = true;
                continue;
            }
            EdgeRef q = s.partner(node.poly, e);
            DevNode child;
            child.poly = q.poly;
            child.shift = node.shift - s.gluing_shift(node.poly, e);
            child.cone = next_cone;
            child.parent = static_cast<int>(idx);
            child.entry_edge = q.edge;
            if (pool.size() >= kNodeBudget) throw Error("unfolding exceeded node budget");
            pool.push_back(child);
            visit(pool.back(), pool);
            queue.push_back(pool.size() - 1);
        }
    }
}

}  // namespace

std::vector<ConnectionCandidate> unfold_connections(const TranslationSurface& s, int cls,
                                                    const UnfoldRegion& region, bool* truncated) {
    std::vector<DevNode> roots;
    for (auto [p, v] : s.cone_point(cls).corners) {
        for (const Cone& c : s.corner_subwedges(p, v)) {
            DevNode root;
            root.poly = p;
            root.shift = -s.vertex(p, v);
            root.cone = c;
            roots.push_back(root);
        }
    }

    std::vector<ConnectionCandidate> out;
    std::map<std::string, size_t> seen;
    RegionTest test(region);
    run_unfold(s, std::move(roots), region, truncated,
               [&](const DevNode& node, const std::vector<DevNode>& pool) {
                   int ne = s.num_edges(node.poly);
                   for (int v = 0; v < ne; ++v) {
                       Vec2q dev = s.vertex(node.poly, v) + node.shift;
                       if (dev.is_zero()) continue;
                       if (!node.cone.contains_strict(dev)) continue;
                       if (!test.point_may_hit(dev)) continue;
                       ConnectionCandidate cand;
                       cand.holonomy = dev;
                       cand.start_class = cls;
                       cand.end_class = s.vertex_class(node.poly, v);
                       std::string key = std::to_string(cand.end_class) + "|" + dev.x.str() +
                                         "|" + dev.y.str();
                       if (seen.count(key)) continue;
                       std::vector<std::pair<int, int>> path;
                       for (const DevNode* n = &node;;) {
                           path.emplace_back(n->poly, n->entry_edge);
                           if (n->parent < 0) break;
                           n = &pool[n->parent];
                       }
                       std::reverse(path.begin(), path.end());
                       cand.path = std::move(path);
                       seen[key] = out.size();
                       out.push_back(std::move(cand));
                   }
               });
    return out;
}

// ---------------------------------------------------------------------------
// Chord queries: distances are metric-level outputs, so the walk below runs
// on doubles with conservative tolerances (ambiguous sheets are kept, target
// membership is closed-with-slack). Value error is at floating precision.
// ---------------------------------------------------------------------------

namespace {

struct FpNode {
    int poly = -1;
    double sx = 0, sy = 0;            // shift
    double lox = 0, loy = 0, hix = 0, hiy = 0;
    bool full = false;
    int entry_edge = -1;
};

struct FpSurface {
    std::vector<std::vector<std::array<double, 2>>> verts;
    explicit FpSurface(const TranslationSurface& s) : verts(s.num_polygons()) {
        for (int p = 0; p < s.num_polygons(); ++p)
            for (const auto& v : s.polygon(p)) verts[p].push_back({v.xd(), v.yd()});
    }
};

constexpr double kFpTol = 1e-9;

}  // namespace

std::vector<double> unfold_chords(const TranslationSurface& s, const ChordSource& src,
                                  const std::vector<std::pair<int, Vec2q>>& targets,
                                  const UnfoldRegion& region, bool* truncated,
                                  std::size_t first_target) {
    FpSurface fp(s);
    const Mat2d& m = region.metric;
    double radius = region.radius;

    std::vector<std::vector<std::pair<int, std::array<double, 2>>>> per_poly(s.num_polygons());
    for (size_t i = first_target; i < targets.size(); ++i) {
        auto& t = targets[i];
        per_poly[t.first].push_back({static_cast<int>(i), {t.second.xd(), t.second.yd()}});
    }

    std::vector<FpNode> pool;
    if (src.cls >= 0) {
        for (auto [p, v] : s.cone_point(src.cls).corners) {
            for (const Cone& c : s.corner_subwedges(p, v)) {
                FpNode root;
                root.poly = p;
                root.sx = -s.vertex(p, v).xd();
                root.sy = -s.vertex(p, v).yd();
                root.lox = c.lo.xd();
                root.loy = c.lo.yd();
                root.hix = c.hi.xd();
                root.hiy = c.hi.yd();
                pool.push_back(root);
            }
        }
    } else {
        FpNode root;
        root.poly = src.poly;
        root.sx = -src.point.xd();
        root.sy = -src.point.yd();
        root.full = true;
        pool.push_back(root);
        // a source on a glued edge is visible from both sides
        const auto& verts = s.polygon(src.poly);
        int n = static_cast<int>(verts.size());
        for (int e = 0; e < n; ++e) {
            const Vec2q& a = verts[e];
            const Vec2q& b = verts[(e + 1) % n];
            if (s.edge_is_glued(src.poly, e) && orient(a, b, src.point) == 0 &&
                dot_sign(src.point - a, b - a) >= 0 && dot_sign(src.point - b, a - b) >= 0) {
                EdgeRef q = s.partner(src.poly, e);
                Vec2q moved = src.point + s.gluing_shift(src.poly, e);
                FpNode twin;
                twin.poly = q.poly;
                twin.sx = -moved.xd();
                twin.sy = -moved.yd();
                twin.full = true;
                twin.entry_edge = q.edge;
                pool.push_back(twin);
                break;
            }
        }
    }

    std::vector<double> best(targets.size(), std::numeric_limits<double>::infinity());
    auto visit = [&](const FpNode& node) {
        for (auto& [ti, txy] : per_poly[node.poly]) {
            double dx = txy[0] + node.sx, dy = txy[1] + node.sy;
            if (!node.full) {
                double scale = std::hypot(dx, dy) + 1;
                if (node.lox * dy - node.loy * dx < -kFpTol * scale) continue;
                if (dx * node.hiy - dy * node.hix < -kFpTol * scale) continue;
            }
            double mx = m.a * dx + m.b * dy, my = m.c * dx + m.d * dy;
            double len = std::hypot(mx, my);
            if (len <= radius * (1 + kFpTol) && len < best[ti]) best[ti] = len;
        }
    };

    std::deque<size_t> queue;
    for (size_t i = 0; i < pool.size(); ++i) {
        visit(pool[i]);
        queue.push_back(i);
    }
    while (!queue.empty()) {
        FpNode node = pool[queue.front()];
        queue.pop_front();
        const auto& verts = fp.verts[node.poly];
        int ne = static_cast<int>(verts.size());
        for (int e = 0; e < ne; ++e) {
            if (e == node.entry_edge) continue;
            double ax = verts[e][0] + node.sx, ay = verts[e][1] + node.sy;
            double bx = verts[(e + 1) % ne][0] + node.sx, by = verts[(e + 1) % ne][1] + node.sy;
            double cr = ax * by - ay * bx;
            double gate_scale = (std::hypot(ax, ay) + std::hypot(bx, by)) + 1e-300;
            if (std::abs(cr) <= kFpTol * gate_scale) continue;  // collinear gate
            double glox = ax, gloy = ay, ghix = bx, ghiy = by;
            if (cr < 0) {
                std::swap(glox, ghix);
                std::swap(gloy, ghiy);
            }
            FpNode child;
            if (node.full) {
                child.lox = glox;
                child.loy = gloy;
                child.hix = ghix;
                child.hiy = ghiy;
            } else {
                // cone intersection, keeping ambiguity
                child.lox = node.lox;
                child.loy = node.loy;
                if (node.lox * gloy - node.loy * glox > 0) {
                    child.lox = glox;
                    child.loy = gloy;
                }
                child.hix = node.hix;
                child.hiy = node.hiy;
                if (ghix * node.hiy - ghiy * node.hix > 0) {
                    child.hix = ghix;
                    child.hiy = ghiy;
                }
                // strict positivity: degenerate sheets would cycle forever, and
                // their boundary chords are caught through sibling sheets
                double cscale = std::hypot(child.lox, child.loy) *
                                    std::hypot(child.hix, child.hiy) +
                                1e-300;
                if (child.lox * child.hiy - child.loy * child.hix <= kFpTol * cscale) continue;
            }
            // prune: nearest point of the gate segment in the deformed metric
            {
                double pax = m.a * ax + m.b * ay, pay = m.c * ax + m.d * ay;
                double pbx = m.a * bx + m.b * by, pby = m.c * bx + m.d * by;
                double vx = pbx - pax, vy = pby - pay;
                double vv = vx * vx + vy * vy;
                double t = vv > 0 ? std::clamp(-(pax * vx + pay * vy) / vv, 0.0, 1.0) : 0.0;
                if (std::hypot(pax + t * vx, pay + t * vy) > radius * (1 + kFpTol)) continue;
            }
            if (!s.edge_is_glued(node.poly, e)) {
                if (truncated && s.edge_is_boundary(node.poly, e)) *truncated = true;
                continue;
            }
            EdgeRef q = s.partner(node.poly, e);
            const Vec2q& g = s.gluing_shift(node.poly, e);
            child.poly = q.poly;
            child.sx = node.sx - g.xd();
            child.sy = node.sy - g.yd();
            child.entry_edge = q.edge;
            if (pool.size() >= kNodeBudget) throw Error("unfolding exceeded node budget");
            pool.push_back(child);
            visit(pool.back());
            queue.push_back(pool.size() - 1);
        }
    }
    return best;
}

}  // namespace flatcrit
