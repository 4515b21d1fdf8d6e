#include "flatcrit/trace.hpp"

#include <cmath>
#include <limits>

namespace flatcrit {

namespace {

// Locate the edge the point lies on, if any; returns -1 when strictly interior.
// A vertex position is reported through `at_vertex`.
int locate_on_edge(const TranslationSurface& s, int poly, const Vec2q& p, bool& at_vertex) {
    at_vertex = false;
    const auto& verts = s.polygon(poly);
    int n = static_cast<int>(verts.size());
    for (int e = 0; e < n; ++e) {
        if (p == verts[e]) {
            at_vertex = true;
            return e;
        }
    }
    for (int e = 0; e < n; ++e) {
        const Vec2q& a = verts[e];
        const Vec2q& b = verts[(e + 1) % n];
        if (orient(a, b, p) == 0 && dot_sign(p - a, b - a) > 0 && dot_sign(p - b, a - b) > 0)
            return e;
    }
    return -1;
}

struct ExitHit {
    bool found = false;
    QuadNum t;
    int edge = -1;
    int vertex = -1;  // vertex index when the exit is a polygon vertex
    Vec2q point;
};

// Earliest strictly-positive crossing of the ray p + t*d with the polygon
// boundary, ignoring `skip_edge` (the entry edge, which contains p).
// A conservative double prescreen shortlists candidate edges; the winner is
// decided by exact comparisons among the shortlist, so the combinatorial
// outcome does not depend on floating point. The shortlist margin is far
// above the attainable rounding error at fixture coordinate magnitudes.
ExitHit find_exit(const TranslationSurface& s, int poly, const Vec2q& p, const Vec2q& d,
                  int skip_edge) {
    const auto& verts = s.polygon(poly);
    int n = static_cast<int>(verts.size());

    double px = p.xd(), py = p.yd();
    double dx = d.xd(), dy = d.yd();
    double scale = std::abs(px) + std::abs(py) + std::hypot(dx, dy) + 1;
    const double margin = 1e-6 * scale;

    // prescreen
    double best_t_d = std::numeric_limits<double>::infinity();
    std::array<int, 8> shortlist;
    int nshort = 0;
    std::vector<int> overflow;
    auto push = [&](int e) {
        if (nshort < static_cast<int>(shortlist.size())) shortlist[nshort++] = e;
        else overflow.push_back(e);
    };
    std::vector<double> t_ds(n, std::numeric_limits<double>::infinity());
    for (int e = 0; e < n; ++e) {
        if (e == skip_edge) continue;
        const Vec2q& a = verts[e];
        const Vec2q& b = verts[(e + 1) % n];
        double ax = a.xd(), ay = a.yd();
        double ex = b.xd() - ax, ey = b.yd() - ay;
        double denom = dx * ey - dy * ex;
        double elen = std::hypot(ex, ey) + 1e-300;
        if (elen < 1e-6 || std::abs(denom) < 1e-4 * elen * scale) {
            // tiny or near-parallel edge: doubles untrustworthy, examine exactly
            t_ds[e] = -1;
            push(e);
            continue;
        }
        double t = ((ax - px) * ey - (ay - py) * ex) / denom;
        double u = ((ax - px) * dy - (ay - py) * dx) / denom;
        if (t <= -margin || u < -1e-4 || u > 1 + 1e-4) continue;
        if (t < margin) {
            // too close to the start to sign-test in doubles; decide exactly,
            // and keep it out of the minimum (its exact t may be <= 0)
            t_ds[e] = -1;
            push(e);
            continue;
        }
        t_ds[e] = t;
        if (t < best_t_d) best_t_d = t;
        push(e);
    }
    ExitHit best;
    auto consider = [&](int e) {
        if (t_ds[e] >= 0 && t_ds[e] > best_t_d + margin) return;  // clearly later
        const Vec2q& a = verts[e];
        const Vec2q& b = verts[(e + 1) % n];
        Vec2q ab = b - a;
        QuadNum denom = cross(d, ab);
        if (denom.sign() == 0) return;  // parallel: endpoints covered by adjacent edges
        QuadNum t = cross(a - p, ab) / denom;
        if (t.sign() <= 0) return;
        QuadNum u = cross(a - p, d) / denom;
        int su = u.sign();
        int su1 = (u - QuadNum(1)).sign();
        if (su < 0 || su1 > 0) return;
        if (!best.found || t < best.t) {
            best.found = true;
            best.t = t;
            best.edge = e;
            best.vertex = su == 0 ? e : (su1 == 0 ? (e + 1) % n : -1);
            best.point = p + d * t;
        }
    };
    for (int i = 0; i < nshort; ++i) consider(shortlist[i]);
    for (int e : overflow) consider(e);
    return best;
}

}  // namespace

namespace {

ExactTrajectory trace_loop(const TranslationSurface& s, int poly, Vec2q start, const Vec2q& dir,
                           int entry_edge, const QuadNum& tau_budget, bool record_steps) {
    ExactTrajectory out;
    QuadNum tau_acc(0);
    for (;;) {
        ExitHit hit = find_exit(s, poly, start, dir, entry_edge);
        if (!hit.found) throw Error("ray failed to exit polygon (degenerate geometry)");

        QuadNum tau_next = tau_acc + hit.t;
        if (tau_next > tau_budget) {
            QuadNum rest = tau_budget - tau_acc;
            Vec2q end = start + dir * rest;
            if (record_steps) out.steps.push_back({poly, start, end, -1});
            out.status = TraceStatus::Completed;
            out.tau_total = tau_budget;
            out.end_poly = poly;
            out.end_point = end;
            return out;
        }
        if (record_steps) out.steps.push_back({poly, start, hit.point, hit.edge});
        tau_acc = tau_next;
        if (hit.vertex >= 0) {
            out.hit_class = s.vertex_class(poly, hit.vertex);
            // vertices on the truncation frontier count as leaving the surface
            out.status = s.cone_point(out.hit_class).boundary ? TraceStatus::Escaped
                                                              : TraceStatus::HitSingularity;
            out.tau_total = tau_acc;
            out.end_poly = poly;
            out.end_point = hit.point;
            return out;
        }
        if (s.edge_is_boundary(poly, hit.edge)) {
            out.status = TraceStatus::Escaped;
            out.tau_total = tau_acc;
            out.end_poly = poly;
            out.end_point = hit.point;
            out.escape_edge = {poly, hit.edge};
            return out;
        }
        EdgeRef q = s.partner(poly, hit.edge);
        start = hit.point + s.gluing_shift(poly, hit.edge);
        poly = q.poly;
        entry_edge = q.edge;
        if (tau_acc == tau_budget) {
            out.status = TraceStatus::BudgetOnEdge;
            out.tau_total = tau_acc;
            out.end_poly = poly;
            out.end_point = start;
            return out;
        }
    }
}

}  // namespace

ExactTrajectory trace_ray_exact(const TranslationSurface& s, int poly, Vec2q start, Vec2q dir,
                                const QuadNum& tau_budget, bool record_steps) {
    if (dir.is_zero()) throw Error("zero direction");
    bool at_vertex = false;
    int on_edge = locate_on_edge(s, poly, start, at_vertex);
    if (at_vertex) throw Error("starts at singularity");
    // Starting on an edge, pointing outward: cross to the partner first.
    if (on_edge >= 0) {
        int side = cross_sign(s.edge_vector(poly, on_edge), dir);
        if (side < 0) {
            if (s.edge_is_boundary(poly, on_edge)) {
                ExactTrajectory out;
                out.status = TraceStatus::Escaped;
                out.escape_edge = {poly, on_edge};
                out.end_poly = poly;
                out.end_point = start;
                return out;
            }
            EdgeRef q = s.partner(poly, on_edge);
            start = start + s.gluing_shift(poly, on_edge);
            poly = q.poly;
            on_edge = q.edge;
        } else if (side == 0) {
            // Sliding along the edge: the exit is the far endpoint (a vertex).
            on_edge = -1;
        }
    }
    return trace_loop(s, poly, start, dir, on_edge, tau_budget, record_steps);
}

ExactTrajectory trace_from_vertex(const TranslationSurface& s, int poly, int vertex,
                                  const Vec2q& dir, const QuadNum& tau_budget,
                                  bool record_steps) {
    if (dir.is_zero()) throw Error("zero direction");
    // The direction must point strictly into the corner wedge; then the only
    // t = 0 crossings are at the incident edges, excluded by strict positivity.
    return trace_loop(s, poly, s.vertex(poly, vertex), dir, -1, tau_budget, record_steps);
}

ExactTrajectory trace_ray_monitored(const TranslationSurface& s, int poly, Vec2q start,
                                    Vec2q dir, const QuadNum& tau_budget, EdgeRef monitored,
                                    std::vector<EdgeCrossing>& crossings, int stop_after) {
    ExactTrajectory out;
    if (dir.is_zero()) throw Error("zero direction");
    EdgeRef monitored_partner = s.partner(monitored.poly, monitored.edge);

    bool at_vertex = false;
    int on_edge = locate_on_edge(s, poly, start, at_vertex);
    if (at_vertex) throw Error("starts at singularity");
    if (on_edge >= 0) {
        int side = cross_sign(s.edge_vector(poly, on_edge), dir);
        if (side < 0) {
            if (s.edge_is_boundary(poly, on_edge)) {
                out.status = TraceStatus::Escaped;
                out.escape_edge = {poly, on_edge};
                return out;
            }
            EdgeRef q = s.partner(poly, on_edge);
            start = start + s.gluing_shift(poly, on_edge);
            poly = q.poly;
            on_edge = q.edge;
        } else if (side == 0) {
            on_edge = -1;
        }
    }

    QuadNum tau_acc(0);
    int entry_edge = on_edge;
    for (;;) {
        ExitHit hit = find_exit(s, poly, start, dir, entry_edge);
        if (!hit.found) throw Error("ray failed to exit polygon (degenerate geometry)");
        QuadNum tau_next = tau_acc + hit.t;
        if (tau_next > tau_budget) {
            out.status = TraceStatus::Completed;
            out.tau_total = tau_budget;
            out.end_poly = poly;
            out.end_point = start + dir * (tau_budget - tau_acc);
            return out;
        }
        tau_acc = tau_next;
        if (hit.vertex >= 0) {
            out.status = TraceStatus::HitSingularity;
            out.tau_total = tau_acc;
            out.end_poly = poly;
            out.end_point = hit.point;
            out.hit_class = s.vertex_class(poly, hit.vertex);
            return out;
        }
        EdgeRef here{poly, hit.edge};
        if (here == monitored || here == monitored_partner) {
            // Express the crossing in the monitored edge's own parameter; the
            // partner edge runs in the opposite direction.
            Vec2q rel = hit.point - s.vertex(here.poly, here.edge);
            Vec2q evec = s.edge_vector(here.poly, here.edge);
            QuadNum u = dot(rel, evec) / evec.norm2();
            if (here == monitored_partner) u = QuadNum(1) - u;
            crossings.push_back({tau_acc, u});
            if (stop_after >= 0 && static_cast<int>(crossings.size()) >= stop_after) {
                out.status = TraceStatus::Completed;
                out.tau_total = tau_acc;
                out.end_poly = poly;
                out.end_point = hit.point;
                return out;
            }
        }
        if (s.edge_is_boundary(poly, hit.edge)) {
            out.status = TraceStatus::Escaped;
            out.tau_total = tau_acc;
            out.end_poly = poly;
            out.end_point = hit.point;
            out.escape_edge = {poly, hit.edge};
            return out;
        }
        EdgeRef q = s.partner(poly, hit.edge);
        start = hit.point + s.gluing_shift(poly, hit.edge);
        poly = q.poly;
        entry_edge = q.edge;
    }
}

ApproxTrajectory trace_ray_approx(const TranslationSurface& s, int poly, double sx, double sy,
                                  double dx, double dy, double length_budget, bool record_steps,
                                  double guard) {
    ApproxTrajectory out;
    double dn = std::hypot(dx, dy);
    if (dn == 0) throw Error("zero direction");
    dx /= dn;
    dy /= dn;

    // Cache polygon vertices as doubles.
    std::vector<std::vector<std::array<double, 2>>> pv(s.num_polygons());
    for (int p = 0; p < s.num_polygons(); ++p)
        for (const auto& v : s.polygon(p)) pv[p].push_back({v.xd(), v.yd()});

    double remaining = length_budget;
    int entry_edge = -1;
    // Decide the starting edge situation numerically.
    {
        const auto& verts = pv[poly];
        int n = static_cast<int>(verts.size());
        for (int e = 0; e < n; ++e) {
            double ax = verts[e][0], ay = verts[e][1];
            double bx = verts[(e + 1) % n][0], by = verts[(e + 1) % n][1];
            double ex = bx - ax, ey = by - ay;
            double el = std::hypot(ex, ey);
            double c = ((sx - ax) * ey - (sy - ay) * ex) / el;
            double along = ((sx - ax) * ex + (sy - ay) * ey) / (el * el);
            if (std::abs(c) < guard && along > -guard && along < 1 + guard) {
                if (ex * dy - ey * dx > 0) entry_edge = e;  // dir points inward across e
                else {
                    // points outward: cross first
                    if (s.edge_is_boundary(poly, e)) {
                        out.status = TraceStatus::Escaped;
                        return out;
                    }
                    EdgeRef q = s.partner(poly, e);
                    const Vec2q& sh = s.gluing_shift(poly, e);
                    sx += sh.xd();
                    sy += sh.yd();
                    poly = q.poly;
                    entry_edge = q.edge;
                }
                break;
            }
        }
    }

    for (;;) {
        const auto& verts = pv[poly];
        int n = static_cast<int>(verts.size());
        double best_t = std::numeric_limits<double>::infinity();
        int best_edge = -1;
        double best_u = 0;
        for (int e = 0; e < n; ++e) {
            if (e == entry_edge) continue;
            double ax = verts[e][0], ay = verts[e][1];
            double ex = verts[(e + 1) % n][0] - ax, ey = verts[(e + 1) % n][1] - ay;
            double denom = dx * ey - dy * ex;
            if (std::abs(denom) < 1e-300) continue;
            double t = ((ax - sx) * ey - (ay - sy) * ex) / denom;
            if (t <= guard) continue;
            double u = ((ax - sx) * dy - (ay - sy) * dx) / denom;
            if (u < -guard || u > 1 + guard) continue;
            if (t < best_t) {
                best_t = t;
                best_edge = e;
                best_u = u;
            }
        }
        if (best_edge < 0) {
            out.status = TraceStatus::HitSingularity;  // numerically cornered
            return out;
        }
        if (best_t >= remaining) {
            double ex2 = sx + dx * remaining, ey2 = sy + dy * remaining;
            if (record_steps) out.steps.push_back({poly, sx, sy, ex2, ey2});
            out.length += remaining;
            out.status = TraceStatus::Completed;
            out.end_poly = poly;
            out.end_x = ex2;
            out.end_y = ey2;
            return out;
        }
        double hx = sx + dx * best_t, hy = sy + dy * best_t;
        if (record_steps) out.steps.push_back({poly, sx, sy, hx, hy});
        out.length += best_t;
        remaining -= best_t;

        // Guard band: crossing too close to either endpoint counts as singular.
        {
            double ax = verts[best_edge][0], ay = verts[best_edge][1];
            double bx = verts[(best_edge + 1) % n][0], by = verts[(best_edge + 1) % n][1];
            double el = std::hypot(bx - ax, by - ay);
            if (best_u * el < guard * (1 + el) || (1 - best_u) * el < guard * (1 + el)) {
                out.status = TraceStatus::HitSingularity;
                out.end_poly = poly;
                out.end_x = hx;
                out.end_y = hy;
                return out;
            }
        }
        if (s.edge_is_boundary(poly, best_edge)) {
            out.status = TraceStatus::Escaped;
            out.end_poly = poly;
            out.end_x = hx;
            out.end_y = hy;
            return out;
        }
        EdgeRef q = s.partner(poly, best_edge);
        const Vec2q& sh = s.gluing_shift(poly, best_edge);
        sx = hx + sh.xd();
        sy = hy + sh.yd();
        poly = q.poly;
        entry_edge = q.edge;
    }
}

}  // namespace flatcrit
