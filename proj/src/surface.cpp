#include "flatcrit/surface.hpp"

#include <algorithm>
#include <numeric>

namespace flatcrit {

namespace {

std::string edge_id(const std::vector<std::string>& names, int p, int e) {
    return names[p] + ".edge" + std::to_string(e);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

TranslationSurface TranslationSurface::build(const SurfaceData& data) {
    TranslationSurface s;
    s.field_d_ = data.field_d;
    s.label_ = data.label;
    s.polys_ = data.polygons;
    s.names_ = data.polygon_names;
    if (!QuadNum::is_valid_discriminant(s.field_d_))
        throw Error("invalid field discriminant " + std::to_string(s.field_d_));
    if (s.polys_.empty()) throw Error("surface has no polygons");
    if (s.names_.size() != s.polys_.size()) {
        s.names_.resize(s.polys_.size());
        for (size_t i = 0; i < s.names_.size(); ++i)
            if (s.names_[i].empty()) s.names_[i] = "P" + std::to_string(i);
    }

    int np = s.num_polygons();
    for (int p = 0; p < np; ++p) {
        const auto& poly = s.polys_[p];
        if (poly.size() < 3)
            throw Error("polygon " + s.names_[p] + " has fewer than 3 vertices");
        for (const auto& v : poly) {
            for (const QuadNum* c : {&v.x, &v.y}) {
                if (c->d() != 0 && c->d() != s.field_d_)
                    throw Error("field mismatch in polygon " + s.names_[p]);
            }
        }
        if (!polygon_is_simple(poly))
            throw Error("non-simple polygon " + s.names_[p]);
        if (polygon_area2(poly).sign() <= 0)
            throw Error("polygon " + s.names_[p] + " not positively oriented");
        if (!polygon_is_convex(poly)) s.all_convex_ = false;
    }

    s.partners_.assign(np, {});
    s.boundary_.assign(np, {});
    s.shifts_.assign(np, {});
    for (int p = 0; p < np; ++p) {
        int ne = s.num_edges(p);
        s.partners_[p].assign(ne, EdgeRef{});
        s.boundary_[p].assign(ne, false);
        s.shifts_[p].assign(ne, Vec2q{});
    }

    auto check_edge = [&](int p, int e) {
        if (p < 0 || p >= np || e < 0 || e >= s.num_edges(p))
            throw Error("gluing references unknown edge " + std::to_string(p) + "." +
                        std::to_string(e));
    };
    for (const auto& g : data.gluings) {
        int p1 = g[0], e1 = g[1], p2 = g[2], e2 = g[3];
        check_edge(p1, e1);
        check_edge(p2, e2);
        if (p1 == p2 && e1 == e2)
            throw Error("edge glued to itself: " + edge_id(s.names_, p1, e1));
        if (s.partners_[p1][e1].valid() || s.partners_[p2][e2].valid())
            throw Error("edge glued twice: " + edge_id(s.names_, p1, e1));
        Vec2q h1 = s.edge_vector(p1, e1);
        Vec2q h2 = s.edge_vector(p2, e2);
        if (!(h1 + h2).is_zero())
            throw Error("holonomy mismatch " + edge_id(s.names_, p1, e1) + " <-> " +
                        edge_id(s.names_, p2, e2));
        s.partners_[p1][e1] = {p2, e2};
        s.partners_[p2][e2] = {p1, e1};
    }
    for (const auto& b : data.boundary) {
        check_edge(b.first, b.second);
        if (s.partners_[b.first][b.second].valid())
            throw Error("marked boundary edge is glued: " + edge_id(s.names_, b.first, b.second));
        s.boundary_[b.first][b.second] = true;
        s.has_boundary_ = true;
    }
    for (int p = 0; p < np; ++p) {
        for (int e = 0; e < s.num_edges(p); ++e) {
            if (!s.partners_[p][e].valid() && !s.boundary_[p][e])
                throw Error("unglued edge " + edge_id(s.names_, p, e));
            if (s.partners_[p][e].valid()) {
                EdgeRef q = s.partners_[p][e];
                // crossing out of edge e: vertex v_e lands on partner vertex w_{j+1}
                const auto& qpoly = s.polys_[q.poly];
                Vec2q target = qpoly[(q.edge + 1) % qpoly.size()];
                s.shifts_[p][e] = target - s.vertex(p, e);
            }
        }
    }

    s.build_classes();
    return s;
}

Vec2q TranslationSurface::corner_dir_out(int p, int v) const {
    return edge_vector(p, v);
}

Vec2q TranslationSurface::corner_dir_in_neg(int p, int v) const {
    int n = num_edges(p);
    return -edge_vector(p, (v + n - 1) % n);
}

std::pair<int, int> TranslationSurface::corner_next(int p, int v) const {
    int n = num_edges(p);
    int prev_edge = (v + n - 1) % n;
    EdgeRef q = partners_[p][prev_edge];
    if (!q.valid()) return {-1, -1};
    return {q.poly, q.edge};
}

std::pair<int, int> TranslationSurface::corner_prev(int p, int v) const {
    EdgeRef q = partners_[p][v];
    if (!q.valid()) return {-1, -1};
    return {q.poly, (q.edge + 1) % num_edges(q.poly)};
}

void TranslationSurface::build_classes() {
    int np = num_polygons();
    std::vector<int> offset(np + 1, 0);
    for (int p = 0; p < np; ++p) offset[p + 1] = offset[p] + num_edges(p);
    UnionFind uf(offset[np]);
    for (int p = 0; p < np; ++p) {
        int ne = num_edges(p);
        for (int e = 0; e < ne; ++e) {
            EdgeRef q = partners_[p][e];
            if (!q.valid()) continue;
            int nq = num_edges(q.poly);
            uf.unite(offset[p] + e, offset[q.poly] + (q.edge + 1) % nq);
            uf.unite(offset[p] + (e + 1) % ne, offset[q.poly] + q.edge);
        }
    }

    vclass_.assign(np, {});
    std::vector<int> root_to_class;
    std::vector<int> class_of_root(offset[np], -1);
    for (int p = 0; p < np; ++p) {
        vclass_[p].assign(num_edges(p), -1);
        for (int v = 0; v < num_edges(p); ++v) {
            int r = uf.find(offset[p] + v);
            if (class_of_root[r] < 0) {
                class_of_root[r] = static_cast<int>(root_to_class.size());
                root_to_class.push_back(r);
            }
            vclass_[p][v] = class_of_root[r];
        }
    }

    classes_.assign(root_to_class.size(), ConePoint{});
    std::vector<bool> seen(offset[np], false);
    for (int p = 0; p < np; ++p) {
        for (int v = 0; v < num_edges(p); ++v) {
            if (seen[offset[p] + v]) continue;
            // Walk backward to a boundary break (if any), then forward through
            // the whole corner cycle/chain.
            int cp = p, cv = v;
            bool boundary_class = false;
            for (;;) {
                auto prev = corner_prev(cp, cv);
                if (prev.first < 0) {
                    boundary_class = true;
                    break;
                }
                if (prev.first == p && prev.second == v) break;  // closed cycle
                cp = prev.first;
                cv = prev.second;
            }
            ConePoint cone;
            cone.boundary = boundary_class;
            int wp = cp, wv = cv;
            for (;;) {
                cone.corners.emplace_back(wp, wv);
                seen[offset[wp] + wv] = true;
                auto next = corner_next(wp, wv);
                if (next.first < 0) {
                    cone.boundary = true;
                    break;
                }
                if (next.first == cp && next.second == cv) break;
                wp = next.first;
                wv = next.second;
            }

            if (!cone.boundary) {
                // Refine each corner sweep into strict CCW steps of angle < pi,
                // then count wraps of the direction argument: total angle 2*pi*k.
                std::vector<Vec2q> dirs;
                for (auto [qp, qv] : cone.corners) {
                    Vec2q out = corner_dir_out(qp, qv);
                    Vec2q in_neg = corner_dir_in_neg(qp, qv);
                    dirs.push_back(out);
                    int cs = cross_sign(out, in_neg);
                    if (cs == 0 && dot_sign(out, in_neg) > 0)
                        throw Error("degenerate corner in polygon " + names_[qp]);
                    if (cs <= 0) {
                        dirs.push_back(out.perp());
                        if (cs < 0) dirs.push_back(-out);
                    }
                }
                int wraps = 0;
                size_t m = dirs.size();
                for (size_t i = 0; i < m; ++i)
                    if (arg_cmp(dirs[(i + 1) % m], dirs[i]) <= 0) ++wraps;
                cone.turns = wraps;
            }
            int cls = vclass_[p][v];
            classes_[cls] = std::move(cone);
        }
    }
}

QuadNum TranslationSurface::area_exact() const {
    QuadNum total(0);
    for (const auto& poly : polys_) total += polygon_area2(poly);
    return total;
}

ValidationReport TranslationSurface::validate() const {
    ValidationReport rep;
    for (int p = 0; p < num_polygons(); ++p) {
        const auto& poly = polys_[p];
        if (!polygon_is_simple(poly)) rep.issues.push_back("non-simple polygon " + names_[p]);
        else if (polygon_area2(poly).sign() <= 0)
            rep.issues.push_back("polygon " + names_[p] + " not positively oriented");
        for (int e = 0; e < num_edges(p); ++e) {
            EdgeRef q = partners_[p][e];
            if (!q.valid()) {
                if (!boundary_[p][e])
                    rep.issues.push_back("unglued edge " + edge_id(names_, p, e));
                continue;
            }
            if (!(edge_vector(p, e) + edge_vector(q.poly, q.edge)).is_zero())
                rep.issues.push_back("gluing not a translation at " + edge_id(names_, p, e));
            EdgeRef back = partners_[q.poly][q.edge];
            if (!(back == EdgeRef{p, e}))
                rep.issues.push_back("gluing not an involution at " + edge_id(names_, p, e));
        }
    }
    for (int c = 0; c < num_vertex_classes(); ++c) {
        const ConePoint& cone = classes_[c];
        if (!cone.boundary && cone.turns < 1)
            rep.issues.push_back("vertex class " + std::to_string(c) +
                                 " has non-positive cone angle");
    }
    if (area_exact().sign() <= 0) rep.issues.push_back("non-positive total area");
    return rep;
}

TranslationSurface TranslationSurface::apply_matrix(const Mat2q& m) const {
    if (!(m.det() - QuadNum(1)).is_zero()) throw Error("not area-preserving");
    SurfaceData d = data();
    std::int64_t md = 0;
    for (const QuadNum* e : {&m.a, &m.b, &m.c, &m.d})
        if (e->d() != 0) md = e->d();
    if (md != 0 && field_d_ != 0 && md != field_d_) throw Error("field mismatch");
    if (md != 0 && field_d_ == 0) d.field_d = md;
    for (auto& poly : d.polygons)
        for (auto& v : poly) v = m.apply(v);
    return build(d);
}

SurfaceData TranslationSurface::data() const {
    SurfaceData d;
    d.field_d = field_d_;
    d.label = label_;
    d.polygon_names = names_;
    d.polygons = polys_;
    for (int p = 0; p < num_polygons(); ++p)
        for (int e = 0; e < num_edges(p); ++e) {
            EdgeRef q = partners_[p][e];
            if (q.valid() && (q.poly > p || (q.poly == p && q.edge > e)))
                d.gluings.push_back({p, e, q.poly, q.edge});
            if (boundary_[p][e]) d.boundary.emplace_back(p, e);
        }
    return d;
}

std::vector<Cone> TranslationSurface::corner_subwedges(int p, int v) const {
    Vec2q out = corner_dir_out(p, v);
    Vec2q in_neg = corner_dir_in_neg(p, v);
    std::vector<Cone> cones;
    int cs = cross_sign(out, in_neg);
    if (cs > 0) {
        cones.push_back({out, in_neg});
    } else if (cs == 0) {
        Vec2q mid = out.perp();
        cones.push_back({out, mid});
        cones.push_back({mid, in_neg});
    } else {
        Vec2q m1 = out.perp();
        Vec2q m2 = -out;
        cones.push_back({out, m1});
        cones.push_back({m1, m2});
        cones.push_back({m2, in_neg});
    }
    return cones;
}

bool TranslationSurface::corner_wedge_contains_strict(int p, int v, const Vec2q& d) const {
    for (const Cone& c : corner_subwedges(p, v))
        if (c.contains_strict(d)) return true;
    return false;
}

DeformedSurface geodesic_deform(std::shared_ptr<const TranslationSurface> s, double t) {
    return {std::move(s), Mat2d::geodesic(t)};
}

DeformedSurface apply_matrix_approx(std::shared_ptr<const TranslationSurface> s, const Mat2d& m) {
    if (std::abs(m.det() - 1.0) > 1e-12) throw Error("not area-preserving");
    return {std::move(s), m};
}

TranslationSurface make_square_torus() {
    SurfaceData d;
    d.field_d = 0;
    d.label = "torus";
    d.polygon_names = {"P"};
    QuadNum z(0), one(1);
    d.polygons = {{{z, z}, {one, z}, {one, one}, {z, one}}};
    d.gluings = {{0, 0, 0, 2}, {0, 1, 0, 3}};
    return TranslationSurface::build(d);
}

TranslationSurface make_regular_octagon() {
    SurfaceData d;
    d.field_d = 2;
    d.label = "octagon";
    d.polygon_names = {"P"};
    QuadNum h(Rational(1, 2), Rational(0), 2);        // 1/2
    QuadNum s(Rational(0), Rational(1, 2), 2);        // sqrt(2)/2
    QuadNum z(Rational(0), Rational(0), 2);
    QuadNum one(Rational(1), Rational(0), 2);
    // Side vectors at angles k*pi/4, side length 1.
    std::vector<Vec2q> side = {
        {one, z}, {s, s}, {z, one}, {-s, s}, {-one, z}, {-s, -s}, {z, -one}, {s, -s}};
    std::vector<Vec2q> verts;
    Vec2q cur{z, z};
    for (int k = 0; k < 8; ++k) {
        verts.push_back(cur);
        cur = cur + side[k];
    }
    d.polygons = {verts};
    for (int k = 0; k < 4; ++k) d.gluings.push_back({0, k, 0, k + 4});
    return TranslationSurface::build(d);
}

}  // namespace flatcrit
