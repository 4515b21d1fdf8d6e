#include "flatcrit/veech.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace flatcrit {

namespace {

int qn_cmp(const QuadNum& a, const QuadNum& b) { return (a - b).sign(); }

// Closed-edge membership of a point on edge e of a polygon.
bool point_on_edge(const std::vector<Vec2q>& poly, int e, const Vec2q& p) {
    int n = static_cast<int>(poly.size());
    const Vec2q& a = poly[e];
    const Vec2q& b = poly[(e + 1) % n];
    if (orient(a, b, p) != 0) return false;
    return dot_sign(p - a, b - a) >= 0 && dot_sign(p - b, a - b) >= 0;
}

// Edge of the polygon containing the whole segment [p, q], or -1.
int edge_containing(const std::vector<Vec2q>& poly, const Vec2q& p, const Vec2q& q) {
    int n = static_cast<int>(poly.size());
    for (int e = 0; e < n; ++e)
        if (point_on_edge(poly, e, p) && point_on_edge(poly, e, q)) return e;
    return -1;
}

struct Interval {
    QuadNum lo, hi;  // parameters along a segment
    int piece = -1;  // facing piece index
};

std::string piece_id(int i) { return "piece " + std::to_string(i); }

}  // namespace

CertReport verify_affine_automorphism(const TranslationSurface& s,
                                      const AutomorphismCertificate& cert) {
    CertReport rep;
    auto fail = [&](const std::string& what) { rep.failures.push_back(what); };

    // (a) exact unit determinant
    if (!(cert.matrix.det() - QuadNum(1)).is_zero()) {
        fail("not area-preserving");
        return rep;
    }
    TranslationSurface t = s.apply_matrix(cert.matrix);
    if (!s.all_convex()) {
        fail("verification requires convex polygons");
        return rep;
    }

    const auto& pieces = cert.pieces;
    // piece sanity
    for (size_t i = 0; i < pieces.size(); ++i) {
        const auto& pc = pieces[i];
        if (pc.src_poly < 0 || pc.src_poly >= t.num_polygons() || pc.dst_poly < 0 ||
            pc.dst_poly >= s.num_polygons()) {
            fail(piece_id(i) + ": polygon index out of range");
            return rep;
        }
        if (pc.verts.size() < 3 || !polygon_is_simple(pc.verts) ||
            polygon_area2(pc.verts).sign() <= 0 || !polygon_is_convex(pc.verts)) {
            fail(piece_id(i) + ": not a positively oriented convex polygon");
            return rep;
        }
    }

    // (b) pieces tile apply_matrix(s, M); (c) shifted pieces tile s
    auto check_tiling = [&](const TranslationSurface& host, bool shifted,
                            const char* which) {
        std::vector<QuadNum> covered(host.num_polygons(), QuadNum(0));
        for (size_t i = 0; i < pieces.size(); ++i) {
            const auto& pc = pieces[i];
            int poly = shifted ? pc.dst_poly : pc.src_poly;
            std::vector<Vec2q> verts = pc.verts;
            if (shifted)
                for (auto& v : verts) v = v + pc.shift;
            for (const auto& v : verts)
                if (!convex_contains(host.polygon(poly), v, false)) {
                    fail(piece_id(i) + ": outside " + which + " polygon " +
                         host.polygon_name(poly));
                    return;
                }
            covered[poly] += polygon_area2(verts);
            for (size_t j = 0; j < i; ++j) {
                const auto& qc = pieces[j];
                int qpoly = shifted ? qc.dst_poly : qc.src_poly;
                if (qpoly != poly) continue;
                std::vector<Vec2q> qverts = qc.verts;
                if (shifted)
                    for (auto& v : qverts) v = v + qc.shift;
                auto inter = convex_clip(verts, qverts);
                if (!inter.empty() && polygon_area2(inter).sign() > 0) {
                    fail(piece_id(i) + " overlaps " + piece_id(j) + " in " + which);
                    return;
                }
            }
        }
        for (int p = 0; p < host.num_polygons(); ++p)
            if (!(covered[p] == polygon_area2(host.polygon(p)))) {
                fail(std::string("pieces do not tile ") + which + " polygon " +
                     host.polygon_name(p));
                return;
            }
    };
    check_tiling(t, false, "source");
    if (!rep.failures.empty()) return rep;
    check_tiling(s, true, "target");
    if (!rep.failures.empty()) return rep;

    // (d) gluing respect across every piece interface
    for (size_t i = 0; i < pieces.size(); ++i) {
        const auto& pc = pieces[i];
        size_t nv = pc.verts.size();
        for (size_t ei = 0; ei < nv; ++ei) {
            Vec2q a = pc.verts[ei];
            Vec2q w = pc.verts[(ei + 1) % nv];
            Vec2q dir = w - a;
            if (dir.is_zero()) continue;
            QuadNum dn2 = dir.norm2();

            // frame offset to the facing side
            Vec2q offset{QuadNum(0), QuadNum(0)};
            int facing_poly = pc.src_poly;
            int tedge = edge_containing(t.polygon(pc.src_poly), a, w);
            bool truncated_here = false;
            if (tedge >= 0) {
                if (t.edge_is_boundary(pc.src_poly, tedge)) {
                    rep.truncated.push_back(piece_id(i) + " touches marked boundary (source)");
                    continue;  // nothing across a boundary edge
                }
                EdgeRef q = t.partner(pc.src_poly, tedge);
                offset = t.gluing_shift(pc.src_poly, tedge);
                facing_poly = q.poly;
            }

            // collect facing overlaps and all s-vertex breakpoints
            Vec2q s0 = a + offset;
            std::vector<Interval> cover;
            std::set<std::string> break_keys;
            std::vector<QuadNum> breaks = {QuadNum(0), QuadNum(1)};
            auto add_break = [&](const QuadNum& tau) {
                if (tau.sign() <= 0 || qn_cmp(tau, QuadNum(1)) >= 0) return;
                std::string key = tau.str();
                if (break_keys.insert(key).second) breaks.push_back(tau);
            };
            for (size_t j = 0; j < pieces.size(); ++j) {
                if (j == i && tedge < 0) continue;
                const auto& qc = pieces[j];
                if (qc.src_poly != facing_poly) continue;
                size_t nw = qc.verts.size();
                for (size_t ej = 0; ej < nw; ++ej) {
                    Vec2q a2 = qc.verts[ej];
                    Vec2q w2 = qc.verts[(ej + 1) % nw];
                    if (orient(s0, s0 + dir, a2) != 0 || orient(s0, s0 + dir, w2) != 0)
                        continue;
                    if (dot_sign(w2 - a2, dir) >= 0) continue;  // must run opposite
                    QuadNum lo = dot(w2 - s0, dir) / dn2;
                    QuadNum hi = dot(a2 - s0, dir) / dn2;
                    if (lo.sign() < 0) lo = QuadNum(0);
                    if (qn_cmp(hi, QuadNum(1)) > 0) hi = QuadNum(1);
                    if (qn_cmp(lo, hi) >= 0) continue;
                    cover.push_back({lo, hi, static_cast<int>(j)});
                    add_break(lo);
                    add_break(hi);
                }
            }
            // breakpoints at s-vertices along both image lines
            for (const auto& v : s.polygon(pc.dst_poly)) {
                Vec2q rel = v - (a + pc.shift);
                if (cross_sign(rel, dir) == 0) add_break(dot(rel, dir) / dn2);
            }
            for (const auto& iv : cover) {
                const auto& qc = pieces[iv.piece];
                for (const auto& v : s.polygon(qc.dst_poly)) {
                    Vec2q rel = v - (s0 + qc.shift);
                    if (cross_sign(rel, dir) == 0) add_break(dot(rel, dir) / dn2);
                }
            }
            std::sort(breaks.begin(), breaks.end(),
                      [](const QuadNum& x, const QuadNum& y) { return qn_cmp(x, y) < 0; });

            for (size_t k = 0; k + 1 < breaks.size(); ++k) {
                const QuadNum& lo = breaks[k];
                const QuadNum& hi = breaks[k + 1];
                if (qn_cmp(lo, hi) >= 0) continue;
                const Interval* found = nullptr;
                for (const auto& iv : cover)
                    if (qn_cmp(iv.lo, lo) <= 0 && qn_cmp(hi, iv.hi) <= 0) {
                        found = &iv;
                        break;
                    }
                if (!found) {
                    fail(piece_id(i) + ": interface gap on edge " + std::to_string(ei));
                    break;
                }
                const auto& qc = pieces[found->piece];
                // images of the two sides of this sub-interval
                Vec2q p1 = a + dir * lo;
                Vec2q p2 = a + dir * hi;
                Vec2q qi1 = p1 + pc.shift, qi2 = p2 + pc.shift;
                Vec2q qj1 = p1 + offset + qc.shift, qj2 = p2 + offset + qc.shift;
                if (pc.dst_poly == qc.dst_poly && (qj1 - qi1).is_zero()) continue;  // plain cut
                int e1 = edge_containing(s.polygon(pc.dst_poly), qi1, qi2);
                if (e1 < 0) {
                    fail(piece_id(i) + " vs " + piece_id(found->piece) +
                         ": images separate off-edge");
                    truncated_here = false;
                    break;
                }
                if (s.edge_is_boundary(pc.dst_poly, e1)) {
                    rep.truncated.push_back(piece_id(i) + " maps across marked boundary");
                    truncated_here = true;
                    continue;
                }
                EdgeRef q = s.partner(pc.dst_poly, e1);
                if (q.poly != qc.dst_poly) {
                    fail(piece_id(i) + " vs " + piece_id(found->piece) +
                         ": images on unglued polygons");
                    break;
                }
                Vec2q g = s.gluing_shift(pc.dst_poly, e1);
                if (!((qi1 + g - qj1).is_zero() && (qi2 + g - qj2).is_zero())) {
                    fail(piece_id(i) + " vs " + piece_id(found->piece) +
                         ": gluing translation mismatch");
                    break;
                }
                if (edge_containing(s.polygon(qc.dst_poly), qj1, qj2) != q.edge) {
                    fail(piece_id(i) + " vs " + piece_id(found->piece) +
                         ": image misses the partner edge");
                    break;
                }
            }
            (void)truncated_here;
        }
    }
    return rep;
}

AutomorphismCertificate generate_certificate(const TranslationSurface& s, const Mat2q& m) {
    if (!(m.det() - QuadNum(1)).is_zero()) throw Error("not area-preserving");
    if (!s.all_convex()) throw Error("certificate generation requires convex polygons");
    TranslationSurface t = s.apply_matrix(m);

    // candidate seeds: vertex of the transformed surface onto a vertex of s
    std::vector<Vec2q> seeds;
    std::set<std::string> seen_seed;
    for (int j = 0; j < s.num_polygons(); ++j)
        for (const auto& w : s.polygon(j)) {
            Vec2q tau = w - t.vertex(0, 0);
            if (seen_seed.insert(tau.x.str() + "|" + tau.y.str()).second) seeds.push_back(tau);
        }

    for (const auto& tau0 : seeds) {
        // overlay walk over states (source polygon, target polygon, shift)
        struct State {
            int i, j;
            Vec2q tau;
        };
        std::vector<State> states;
        std::set<std::string> visited;
        auto push = [&](int i, int j, Vec2q tau) {
            std::string key = std::to_string(i) + "|" + std::to_string(j) + "|" + tau.x.str() +
                              "|" + tau.y.str();
            if (visited.insert(key).second) states.push_back({i, j, std::move(tau)});
        };
        for (int j = 0; j < s.num_polygons(); ++j) push(0, j, tau0);

        AutomorphismCertificate cert;
        cert.matrix = m;
        bool aborted = false;
        for (size_t idx = 0; idx < states.size() && !aborted; ++idx) {
            State st = states[idx];
            std::vector<Vec2q> img = s.polygon(st.j);
            for (auto& v : img) v = v - st.tau;
            auto piece = convex_clip(t.polygon(st.i), img);
            if (piece.empty() || polygon_area2(piece).sign() <= 0) continue;

            CertPiece cp;
            cp.src_poly = st.i;
            cp.verts = piece;
            cp.shift = st.tau;
            cp.dst_poly = st.j;
            cert.pieces.push_back(cp);
            if (cert.pieces.size() > 4096) {
                aborted = true;
                break;
            }

            size_t nv = piece.size();
            for (size_t e = 0; e < nv; ++e) {
                const Vec2q& a = piece[e];
                const Vec2q& b = piece[(e + 1) % nv];
                int tedge = edge_containing(t.polygon(st.i), a, b);
                int sedge = edge_containing(img, a, b);
                int ni = st.i, nj = st.j;
                Vec2q ntau = st.tau;
                bool cross_any = false;
                if (tedge >= 0 && t.edge_is_glued(st.i, tedge)) {
                    ni = t.partner(st.i, tedge).poly;
                    ntau = ntau - t.gluing_shift(st.i, tedge);
                    cross_any = true;
                } else if (tedge >= 0) {
                    continue;  // source boundary: nothing beyond
                }
                if (sedge >= 0 && s.edge_is_glued(st.j, sedge)) {
                    nj = s.partner(st.j, sedge).poly;
                    ntau = ntau + s.gluing_shift(st.j, sedge);
                    cross_any = true;
                } else if (sedge >= 0 && s.edge_is_boundary(st.j, sedge)) {
                    if (tedge < 0) continue;  // image side truncated
                }
                if (cross_any) push(ni, nj, ntau);
            }
            if (states.size() > 20000) aborted = true;
        }
        if (aborted || cert.pieces.empty()) continue;

        // quick area screen before the full verification
        std::vector<QuadNum> covered(t.num_polygons(), QuadNum(0));
        for (const auto& pc : cert.pieces) covered[pc.src_poly] += polygon_area2(pc.verts);
        bool full = true;
        for (int p = 0; p < t.num_polygons(); ++p)
            if (!(covered[p] == polygon_area2(t.polygon(p)))) full = false;
        if (!full) continue;

        if (verify_affine_automorphism(s, cert).pass()) return cert;
    }
    throw Error("no cut-and-translate correspondence found");
}

AutomorphismCertificate parse_certificate(const std::string& text,
                                          const TranslationSurface& s) {
    std::map<std::string, int> polys;
    for (int p = 0; p < s.num_polygons(); ++p) polys[s.polygon_name(p)] = p;

    AutomorphismCertificate cert;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    enum class Sec { None, Matrix, Piece } sec = Sec::None;
    std::map<std::string, QuadNum> mat;
    auto trim = [](const std::string& x) {
        size_t a = x.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return std::string();
        size_t b = x.find_last_not_of(" \t\r\n");
        return x.substr(a, b - a + 1);
    };
    auto parse_pair = [&](const std::string& text2) {
        auto comma = text2.find(',');
        if (comma == std::string::npos)
            throw Error("line " + std::to_string(lineno) + ": expected 'x , y'");
        auto px = QuadNum::parse(text2.substr(0, comma));
        auto py = QuadNum::parse(text2.substr(comma + 1));
        if (!px || !py) throw Error("line " + std::to_string(lineno) + ": bad coordinate");
        return Vec2q{*px, *py};
    };
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line == "[matrix]") {
            sec = Sec::Matrix;
            continue;
        }
        if (line == "[piece]") {
            sec = Sec::Piece;
            cert.pieces.emplace_back();
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (sec == Sec::Matrix) {
            auto q = QuadNum::parse(val);
            if (!q) throw Error("line " + std::to_string(lineno) + ": bad matrix entry");
            mat[key] = *q;
        } else if (sec == Sec::Piece) {
            auto& pc = cert.pieces.back();
            if (key == "source" || key == "target") {
                auto it = polys.find(val);
                if (it == polys.end())
                    throw Error("line " + std::to_string(lineno) + ": unknown polygon " + val);
                (key == "source" ? pc.src_poly : pc.dst_poly) = it->second;
            } else if (key == "shift") {
                pc.shift = parse_pair(val);
            } else if (key == "v") {
                pc.verts.push_back(parse_pair(val));
            } else {
                throw Error("line " + std::to_string(lineno) + ": unknown piece key " + key);
            }
        } else {
            throw Error("line " + std::to_string(lineno) + ": content before any section");
        }
    }
    for (const char* k : {"a", "b", "c", "d"})
        if (!mat.count(k)) throw Error("certificate matrix incomplete");
    cert.matrix = Mat2q(mat["a"], mat["b"], mat["c"], mat["d"]);
    return cert;
}

std::string write_certificate(const AutomorphismCertificate& cert,
                              const TranslationSurface& s) {
    std::ostringstream out;
    out << "[matrix]\n";
    out << "a = " << cert.matrix.a.str() << "\n";
    out << "b = " << cert.matrix.b.str() << "\n";
    out << "c = " << cert.matrix.c.str() << "\n";
    out << "d = " << cert.matrix.d.str() << "\n";
    for (const auto& pc : cert.pieces) {
        out << "[piece]\n";
        out << "source = " << s.polygon_name(pc.src_poly) << "\n";
        out << "target = " << s.polygon_name(pc.dst_poly) << "\n";
        out << "shift = " << pc.shift.x.str() << " , " << pc.shift.y.str() << "\n";
        for (const auto& v : pc.verts)
            out << "v = " << v.x.str() << " , " << v.y.str() << "\n";
    }
    return out.str();
}

}  // namespace flatcrit
