#include "flatcrit/surface.hpp"
#include "flatcrit/trace.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

namespace flatcrit {

namespace {

// A leaf germ in direction +d or -d at a vertex class. Germs are totally
// ordered counterclockwise around the class by (corner rank, position within
// the corner wedge); position 0 means the germ runs along the corner's
// outgoing edge.
struct Germ {
    int cls = -1;
    int corner_rank = -1;
    int pos = -1;
    int poly = -1, vertex = -1;
    bool outgoing = false;  // direction +d
    int sc = -1;            // resolved connection index
};

// Position of `dir` among the refined sub-wedge borders of a corner, or
// nullopt when dir lies outside [u_out, -u_in).
std::optional<int> corner_position(const TranslationSurface& s, int p, int v, const Vec2q& dir) {
    auto cones = s.corner_subwedges(p, v);
    for (size_t j = 0; j < cones.size(); ++j) {
        if (same_direction(cones[j].lo, dir)) return static_cast<int>(2 * j);
        if (cones[j].contains_strict(dir)) return static_cast<int>(2 * j + 1);
    }
    return std::nullopt;
}

struct PolySegment {
    int sc;
    Vec2q a, b;
};

}  // namespace

CylinderDecomposition cylinder_decomposition(const TranslationSurface& s, const Vec2q& d,
                                             double length_bound) {
    if (d.is_zero()) throw Error("zero direction");
    CylinderDecomposition out;

    const QuadNum dn2 = d.norm2();
    const double dlen = std::sqrt(dn2.to_double());
    const QuadNum tau_budget(Rational::from_double(length_bound / dlen * (1.0 + 1e-12)));
    if (tau_budget.sign() <= 0) return out;

    // germs, ordered counterclockwise per class
    std::vector<std::vector<Germ>> germs(s.num_vertex_classes());
    for (int c = 0; c < s.num_vertex_classes(); ++c) {
        const ConePoint& cone = s.cone_point(c);
        for (size_t r = 0; r < cone.corners.size(); ++r) {
            auto [p, v] = cone.corners[r];
            for (int sgn : {+1, -1}) {
                auto pos = corner_position(s, p, v, sgn > 0 ? d : -d);
                if (!pos) continue;
                germs[c].push_back(
                    {c, static_cast<int>(r), *pos, p, v, sgn > 0, -1});
            }
        }
        std::sort(germs[c].begin(), germs[c].end(), [](const Germ& a, const Germ& b) {
            return std::tie(a.corner_rank, a.pos) < std::tie(b.corner_rank, b.pos);
        });
    }
    auto find_germ = [&](int p, int v, int pos, bool outgoing) -> Germ* {
        for (auto& g : germs[s.vertex_class(p, v)])
            if (g.poly == p && g.vertex == v && g.pos == pos && g.outgoing == outgoing)
                return &g;
        return nullptr;
    };

    auto& scs = out.connections;
    bool unresolved = false;
    auto add_sc = [&](ParallelConnection pc, Germ* gout, Germ* gin) {
        int idx = static_cast<int>(scs.size());
        scs.push_back(std::move(pc));
        gout->sc = idx;
        gin->sc = idx;
    };

    // glued edges parallel to d are connections outright
    for (int p = 0; p < s.num_polygons(); ++p) {
        for (int e = 0; e < s.num_edges(p); ++e) {
            if (!s.edge_is_glued(p, e)) continue;
            Vec2q ev = s.edge_vector(p, e);
            if (cross_sign(ev, d) != 0) continue;
            QuadNum tau = d.x.sign() != 0 ? ev.x / d.x : ev.y / d.y;
            if (tau.sign() <= 0) continue;  // the partner edge carries the +d orientation
            ParallelConnection pc;
            pc.tau = tau;
            pc.start_poly = p;
            pc.start_vertex = e;
            pc.start_class = s.vertex_class(p, e);
            pc.end_class = s.vertex_class(p, (e + 1) % s.num_edges(p));
            pc.segments.push_back({p, s.vertex(p, e), s.vertex(p, (e + 1) % s.num_edges(p))});
            EdgeRef q = s.partner(p, e);
            Germ* gout = find_germ(p, e, 0, true);
            Germ* gin = find_germ(q.poly, q.edge, 0, false);
            if (!gout || !gin) throw Error("internal: missing edge germ");
            add_sc(std::move(pc), gout, gin);
        }
    }

    // interior separatrices from every strictly-interior outgoing germ
    for (auto& per_class : germs) {
        for (auto& g : per_class) {
            if (!g.outgoing || g.pos % 2 == 0 || g.sc >= 0) continue;
            auto traj = trace_from_vertex(s, g.poly, g.vertex, d, tau_budget, true);
            if (traj.status != TraceStatus::HitSingularity) {
                unresolved = true;
                continue;
            }
            int ep = traj.end_poly, evx = -1;
            for (int v = 0; v < s.num_edges(ep); ++v)
                if (s.vertex(ep, v) == traj.end_point) evx = v;
            if (evx < 0) throw Error("internal: singular hit off-vertex");
            auto pos = corner_position(s, ep, evx, -d);
            Germ* gin = pos ? find_germ(ep, evx, *pos, false) : nullptr;
            if (!gin) {
                unresolved = true;
                continue;
            }
            ParallelConnection pc;
            pc.tau = traj.tau_total;
            pc.start_poly = g.poly;
            pc.start_vertex = g.vertex;
            pc.start_class = g.cls;
            pc.end_class = s.vertex_class(ep, evx);
            for (const auto& st : traj.steps) pc.segments.push_back({st.poly, st.entry, st.exit});
            add_sc(std::move(pc), &g, gin);
        }
    }
    for (const auto& per_class : germs)
        for (const auto& g : per_class)
            if (g.sc < 0) unresolved = true;

    out.residual = unresolved;
    if (scs.empty()) return out;

    // Boundary circles are orbits of the side-adjacency on germs. Walking a
    // connection in +d with the region on its +90-degree side, the circle
    // continues through the outgoing germ clockwise-adjacent to the incoming
    // one; for the region on the other side, counterclockwise-adjacent.
    std::vector<int> sc_in_germ(scs.size(), -1), sc_out_germ(scs.size(), -1);
    std::vector<std::pair<int, int>> germ_index;  // flat index -> (class, slot)
    for (int c = 0; c < s.num_vertex_classes(); ++c)
        for (size_t i = 0; i < germs[c].size(); ++i) {
            const Germ& g = germs[c][i];
            if (g.sc >= 0) {
                if (g.outgoing) sc_out_germ[g.sc] = static_cast<int>(germ_index.size());
                else sc_in_germ[g.sc] = static_cast<int>(germ_index.size());
            }
            germ_index.emplace_back(c, static_cast<int>(i));
        }
    auto germ_at = [&](int flat) -> const Germ& {
        auto [c, i] = germ_index[flat];
        return germs[c][i];
    };
    auto adjacent = [&](int flat, int step) -> int {
        auto [c, i] = germ_index[flat];
        int n = static_cast<int>(germs[c].size());
        int base = flat - i;
        if (s.cone_point(c).boundary) {
            int j = i + step;
            if (j < 0 || j >= n) return -1;
            return base + j;
        }
        return base + ((i + step) % n + n) % n;
    };

    auto build_circles = [&](int side) {
        std::vector<std::vector<int>> circles;
        std::vector<char> used(scs.size(), 0);
        for (size_t start = 0; start < scs.size(); ++start) {
            if (used[start]) continue;
            std::vector<int> circle;
            int cur = static_cast<int>(start);
            bool ok = true;
            for (;;) {
                if (used[cur]) { ok = false; break; }
                circle.push_back(cur);
                used[cur] = 1;
                int gin = sc_in_germ[cur];
                if (gin < 0) { ok = false; break; }
                int gnext = adjacent(gin, side > 0 ? -1 : +1);
                if (gnext < 0 || !germ_at(gnext).outgoing || germ_at(gnext).sc < 0) {
                    ok = false;
                    break;
                }
                if (germ_at(gnext).sc == static_cast<int>(start)) break;
                cur = germ_at(gnext).sc;
            }
            if (ok) circles.push_back(std::move(circle));
        }
        return circles;
    };
    auto bottoms = build_circles(+1);
    auto tops = build_circles(-1);
    std::vector<int> top_of_sc(scs.size(), -1);
    for (size_t i = 0; i < tops.size(); ++i)
        for (int j : tops[i]) top_of_sc[j] = static_cast<int>(i);

    // per-polygon segment lists for probe crossing tests
    std::vector<std::vector<PolySegment>> segs(s.num_polygons());
    for (size_t i = 0; i < scs.size(); ++i)
        for (const auto& seg : scs[i].segments)
            segs[seg.poly].push_back({static_cast<int>(i), seg.a, seg.b});

    const Vec2q dperp = d.perp();
    const QuadNum area = s.area_exact();

    // First crossing of any parallel connection along the upward probe from
    // the point at parameter fraction f inside connection sc_idx.
    auto probe_up = [&](int sc_idx, const Rational& f,
                        const QuadNum& waist_tau) -> std::optional<std::pair<int, QuadNum>> {
        const auto& pc = scs[sc_idx];
        QuadNum tau_at = pc.tau * QuadNum(f);
        int poly = -1;
        Vec2q point;
        QuadNum acc(0);
        for (const auto& seg : pc.segments) {
            QuadNum seg_tau = dot(seg.b - seg.a, d) / dn2;
            if (tau_at <= acc + seg_tau) {
                poly = seg.poly;
                point = seg.a + d * (tau_at - acc);
                break;
            }
            acc += seg_tau;
        }
        if (poly < 0) return std::nullopt;
        QuadNum max_tau = area / (dn2 * waist_tau) * QuadNum(2);
        ExactTrajectory traj;
        try {
            traj = trace_ray_exact(s, poly, point, dperp, max_tau, true);
        } catch (const Error&) {
            return std::nullopt;  // probe grazed a vertex; caller retries at another fraction
        }
        std::optional<std::pair<int, QuadNum>> best;
        QuadNum probe_acc(0);
        for (const auto& st : traj.steps) {
            QuadNum step_tau = dot(st.exit - st.entry, dperp) / dn2;
            for (const auto& seg : segs[st.poly]) {
                QuadNum t = cross(d, seg.a - st.entry) / dn2;
                if (t.sign() < 0 || t > step_tau) continue;
                Vec2q x = st.entry + dperp * t;
                QuadNum along = dot(x - seg.a, d) / dn2;
                QuadNum seg_tau = dot(seg.b - seg.a, d) / dn2;
                if (along.sign() < 0 || along > seg_tau) continue;
                QuadNum global = probe_acc + t;
                if (global.sign() <= 0) continue;
                if (!best || global < best->second) best = {{seg.sc, global}};
            }
            probe_acc += step_tau;
            if (best && best->second <= probe_acc) break;
        }
        return best;
    };

    const QuadNum bound_r(Rational::from_double(length_bound));
    std::vector<char> top_used(tops.size(), 0);
    for (const auto& circle : bottoms) {
        QuadNum waist_tau(0);
        for (int i : circle) waist_tau += scs[i].tau;
        if ((waist_tau * waist_tau * dn2 - bound_r * bound_r).sign() > 0) {
            out.residual = true;  // beyond the waist bound: not reported
            continue;
        }
        const Rational fractions[] = {
            Rational(BigInt(1), BigInt(2)), Rational(BigInt(1), BigInt(3)),
            Rational(BigInt(2), BigInt(5)), Rational(BigInt(3), BigInt(7)),
            Rational(BigInt(5), BigInt(11))};
        int top_idx = -1;
        QuadNum height_tau(0);
        bool consistent = true;
        for (size_t k = 0; k < circle.size() && consistent; ++k) {
            // two independent probes per connection guard against a fake
            // pairing on partially resolved directions
            int hits = 0;
            for (const auto& fr : fractions) {
                auto hit = probe_up(circle[k], fr, waist_tau);
                if (!hit) continue;
                int t = top_of_sc[hit->first];
                if (t < 0) { consistent = false; break; }
                if (top_idx < 0) {
                    top_idx = t;
                    height_tau = hit->second;
                } else if (t != top_idx || !(hit->second == height_tau)) {
                    consistent = false;
                    break;
                }
                if (++hits == 2) break;
            }
            if (hits < 2) consistent = false;
        }
        if (!consistent || top_idx < 0 || top_used[top_idx]) {
            out.residual = true;
            continue;
        }
        QuadNum top_tau(0);
        for (int i : tops[top_idx]) top_tau += scs[i].tau;
        if (!(top_tau == waist_tau)) {
            out.residual = true;
            continue;
        }
        top_used[top_idx] = 1;
        Cylinder cyl;
        cyl.waist_holonomy = d * waist_tau;
        cyl.waist = waist_tau.to_double() * dlen;
        cyl.height = height_tau.to_double() * dlen;
        for (int i : circle) cyl.boundary_connections.push_back(scs[i]);
        out.cylinders.push_back(std::move(cyl));
    }

    // A full resolution must tile the surface exactly; anything else is a bug
    // or an incomplete direction, flagged as residual either way.
    if (!out.residual) {
        double total = 0;
        for (const auto& c : out.cylinders) total += c.waist * c.height;
        if (std::abs(total - s.area()) > 1e-9 * std::max(1.0, s.area())) out.residual = true;
    }
    return out;
}

}  // namespace flatcrit
