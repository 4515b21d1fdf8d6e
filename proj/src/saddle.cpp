#include "flatcrit/saddle.hpp"

#include "flatcrit/unfold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

namespace flatcrit {

namespace {

int qn_cmp(const QuadNum& a, const QuadNum& b) { return (a - b).sign(); }

bool sc_order(const SaddleConnection& a, const SaddleConnection& b) {
    int c = qn_cmp(a.length2(), b.length2());
    if (c != 0) return c < 0;
    c = qn_cmp(a.holonomy.x, b.holonomy.x);
    if (c != 0) return c < 0;
    c = qn_cmp(a.holonomy.y, b.holonomy.y);
    if (c != 0) return c < 0;
    if (a.start_class != b.start_class) return a.start_class < b.start_class;
    return a.end_class < b.end_class;
}

std::vector<SaddleConnection> edge_connections(const TranslationSurface& s) {
    std::vector<SaddleConnection> out;
    for (int p = 0; p < s.num_polygons(); ++p)
        for (int e = 0; e < s.num_edges(p); ++e) {
            if (!s.edge_is_glued(p, e)) continue;
            SaddleConnection sc;
            sc.holonomy = s.edge_vector(p, e);
            sc.start_class = s.vertex_class(p, e);
            sc.end_class = s.vertex_class(p, (e + 1) % s.num_edges(p));
            sc.development_path = {{p, -1}};
            out.push_back(std::move(sc));
        }
    return out;
}

std::vector<SaddleConnection> collect(const TranslationSurface& s, const UnfoldRegion& region,
                                      bool* truncated) {
    std::vector<SaddleConnection> out = edge_connections(s);
    for (int c = 0; c < s.num_vertex_classes(); ++c) {
        for (auto& cand : unfold_connections(s, c, region, truncated)) {
            SaddleConnection sc;
            sc.holonomy = std::move(cand.holonomy);
            sc.start_class = cand.start_class;
            sc.end_class = cand.end_class;
            sc.development_path = std::move(cand.path);
            out.push_back(std::move(sc));
        }
    }
    // dedup by (start, end, exact holonomy)
    std::map<std::string, size_t> seen;
    std::vector<SaddleConnection> unique;
    for (auto& sc : out) {
        std::string key = std::to_string(sc.start_class) + "|" + std::to_string(sc.end_class) +
                          "|" + sc.holonomy.x.str() + "|" + sc.holonomy.y.str();
        if (seen.emplace(key, unique.size()).second) unique.push_back(std::move(sc));
    }
    std::sort(unique.begin(), unique.end(), sc_order);
    return unique;
}

}  // namespace

EnumerateResult enumerate_saddle_connections(const TranslationSurface& s, double bound) {
    if (!(bound > 0)) throw Error("bound must be positive");
    EnumerateResult res;
    auto all = collect(s, UnfoldRegion::disk(bound), &res.truncation_warning);
    QuadNum bound2{Rational::from_double(bound)};
    bound2 *= bound2;
    for (auto& sc : all)
        if (qn_cmp(sc.length2(), bound2) <= 0) res.connections.push_back(std::move(sc));
    return res;
}

namespace {

std::pair<double, SaddleConnection> shortest_impl(const TranslationSurface& s, const Mat2d& m) {
    double seed = std::sqrt(2.0 * s.area() / 3.14159265358979) + 1e-9;
    for (double r = seed; r < 1e9; r *= 2) {
        bool trunc = false;
        auto all = collect(s, UnfoldRegion::deformed_disk(m, r), &trunc);
        const SaddleConnection* best = nullptr;
        double best_len = 0;
        for (const auto& sc : all) {
            auto v = m.apply(sc.holonomy);
            double len = std::hypot(v[0], v[1]);
            if (len <= r && (!best || len < best_len)) {
                best = &sc;
                best_len = len;
            }
        }
        if (best) return {best_len, *best};
    }
    throw Error("no saddle connection found (empty search)");
}

}  // namespace

std::pair<double, SaddleConnection> shortest_saddle_connection(const TranslationSurface& s) {
    return shortest_impl(s, Mat2d::identity());
}

std::pair<double, SaddleConnection> shortest_saddle_connection_deformed(
    const TranslationSurface& s, const Mat2d& m) {
    return shortest_impl(s, m);
}

SystoleEstimate systole_estimate(const TranslationSurface& s, double search_bound) {
    auto [shortest_len, shortest_sc] = shortest_saddle_connection(s);
    if (search_bound < shortest_len) throw Error("search bound below shortest saddle connection");
    SystoleEstimate est;
    est.lower_proxy = shortest_len;

    double best = std::numeric_limits<double>::infinity();
    auto res = enumerate_saddle_connections(s, search_bound);
    // closed saddle-connection loops are homotopically nontrivial closed curves
    for (const auto& sc : res.connections)
        if (sc.start_class == sc.end_class) best = std::min(best, sc.length());
    // cylinder waists in every connection direction
    std::map<std::string, Vec2q> dirs;
    for (const auto& sc : res.connections) {
        Vec2q d = sc.holonomy;
        // canonical projective representative: slope form
        if (d.x.sign() != 0) d = {QuadNum(1), d.y / d.x};
        else d = {QuadNum(0), QuadNum(1)};
        dirs.emplace(d.x.str() + "|" + d.y.str(), d);
    }
    for (const auto& [key, d] : dirs) {
        (void)key;
        auto dec = cylinder_decomposition(s, d, search_bound);
        for (const auto& cyl : dec.cylinders) best = std::min(best, cyl.waist);
    }
    est.closed_curve_upper = best;
    if (est.closed_curve_upper < est.lower_proxy)
        est.closed_curve_upper = est.lower_proxy;  // numeric guard; exact values coincide
    return est;
}

namespace {

// Exact-distance engine over a fixed target net: straight chords plus bends
// at cone points, radius grown until every distance is certified.
struct DistanceNet {
    const TranslationSurface& s;
    Mat2d m;
    std::vector<std::pair<int, Vec2q>> targets;   // net points
    std::vector<std::pair<int, Vec2q>> class_reps;  // one entry per corner, tagged by class
    std::vector<int> rep_class;

    DistanceNet(const TranslationSurface& surf, const Mat2d& metric) : s(surf), m(metric) {
        for (int c = 0; c < s.num_vertex_classes(); ++c)
            for (auto [p, v] : s.cone_point(c).corners) {
                class_reps.emplace_back(p, s.vertex(p, v));
                rep_class.push_back(c);
            }
    }

    // chord tables at radius r
    std::vector<std::vector<double>> class_to_target;  // [class][target]
    std::vector<std::vector<double>> class_to_class;   // [class][class]
    std::vector<std::pair<int, Vec2q>> all;            // targets followed by class reps

    void build_class_tables(double r) {
        int nc = s.num_vertex_classes();
        all = targets;
        for (auto& cr : class_reps) all.push_back(cr);
        class_to_target.assign(nc, {});
        class_to_class.assign(nc, std::vector<double>(nc, std::numeric_limits<double>::infinity()));
        for (int c = 0; c < nc; ++c) {
            ChordSource src;
            src.cls = c;
            auto d = unfold_chords(s, src, all, UnfoldRegion::deformed_disk(m, r));
            class_to_target[c].assign(d.begin(), d.begin() + targets.size());
            for (size_t i = 0; i < class_reps.size(); ++i)
                class_to_class[c][rep_class[i]] =
                    std::min(class_to_class[c][rep_class[i]], d[targets.size() + i]);
        }
        // glued edges join classes directly
        for (int p = 0; p < s.num_polygons(); ++p)
            for (int e = 0; e < s.num_edges(p); ++e) {
                if (!s.edge_is_glued(p, e)) continue;
                auto v = m.apply(s.edge_vector(p, e));
                double len = std::hypot(v[0], v[1]);
                int a = s.vertex_class(p, e), b = s.vertex_class(p, (e + 1) % s.num_edges(p));
                class_to_class[a][b] = std::min(class_to_class[a][b], len);
                class_to_class[b][a] = std::min(class_to_class[b][a], len);
            }
        for (int c = 0; c < nc; ++c) class_to_class[c][c] = 0;
        // closure over multi-bend paths
        for (int k = 0; k < nc; ++k)
            for (int i = 0; i < nc; ++i)
                for (int j = 0; j < nc; ++j)
                    class_to_class[i][j] = std::min(class_to_class[i][j],
                                                    class_to_class[i][k] + class_to_class[k][j]);
        // fold bends into class->target legs
        for (int c = 0; c < nc; ++c)
            for (size_t t = 0; t < targets.size(); ++t)
                for (int k = 0; k < nc; ++k)
                    class_to_target[c][t] = std::min(class_to_target[c][t],
                                                     class_to_class[c][k] + class_to_target[k][t]);
    }

    // distances from target i to targets j >= first (plus the class reps),
    // enough for a symmetric max
    std::vector<double> from(size_t i, double r, size_t first = 0) const {
        ChordSource src;
        src.poly = targets[i].first;
        src.point = targets[i].second;
        // target indices below `first` are skipped (a symmetric max never needs
        // them); the class reps sit past the targets and are always scanned
        auto d = unfold_chords(s, src, all, UnfoldRegion::deformed_disk(m, r), nullptr,
                               std::min(first, targets.size()));
        std::vector<double> to_class(s.num_vertex_classes(),
                                     std::numeric_limits<double>::infinity());
        for (size_t k = 0; k < class_reps.size(); ++k)
            to_class[rep_class[k]] = std::min(to_class[rep_class[k]], d[targets.size() + k]);
        std::vector<double> out(targets.size(), std::numeric_limits<double>::infinity());
        for (size_t j = first; j < targets.size(); ++j) {
            double best = d[j];
            for (int c = 0; c < s.num_vertex_classes(); ++c)
                best = std::min(best, to_class[c] + class_to_target[c][j]);
            out[j] = best;
        }
        return out;
    }
};

std::vector<std::pair<int, Vec2q>> build_net(const TranslationSurface& s, const Mat2d& m,
                                             int sample_count, double& cover_out) {
    std::vector<std::pair<int, Vec2q>> net;
    double cx = std::hypot(m.a, m.c), cy = std::hypot(m.b, m.d);  // column norms
    double area = s.area() * std::abs(m.det());
    double g = std::sqrt(area * 2.0 / std::max(2, sample_count));
    cover_out = 1.2 * g;

    for (int p = 0; p < s.num_polygons(); ++p) {
        const auto& verts = s.polygon(p);
        // polygon vertices and centroid
        net.emplace_back(p, verts[0]);
        Vec2q centroid{QuadNum(0), QuadNum(0)};
        for (const auto& v : verts) centroid = centroid + v;
        QuadNum inv_n{Rational(BigInt(1), BigInt(verts.size()))};
        net.emplace_back(p, Vec2q{centroid.x * inv_n, centroid.y * inv_n});
        // edge subdivision points
        for (int e = 0; e < static_cast<int>(verts.size()); ++e) {
            auto ev = m.apply(s.edge_vector(p, e));
            int k = static_cast<int>(std::ceil(std::hypot(ev[0], ev[1]) / g));
            for (int i = 1; i < k; ++i) {
                QuadNum t{Rational(BigInt(i), BigInt(k))};
                net.emplace_back(p, verts[e] + s.edge_vector(p, e) * t);
            }
        }
        // interior grid, spaced so the deformed image is g-dense
        QuadNum xmin = verts[0].x, xmax = verts[0].x, ymin = verts[0].y, ymax = verts[0].y;
        for (const auto& v : verts) {
            if (qn_cmp(v.x, xmin) < 0) xmin = v.x;
            if (qn_cmp(v.x, xmax) > 0) xmax = v.x;
            if (qn_cmp(v.y, ymin) < 0) ymin = v.y;
            if (qn_cmp(v.y, ymax) > 0) ymax = v.y;
        }
        double bx = g / std::max(cx, 1e-12), by = g / std::max(cy, 1e-12);
        double wx = (xmax - xmin).to_double(), wy = (ymax - ymin).to_double();
        int nx = std::max(1, static_cast<int>(std::floor(wx / bx)) + 1);
        int ny = std::max(1, static_cast<int>(std::floor(wy / by)) + 1);
        if (static_cast<long long>(nx) * ny > 400000) throw Error("diameter net too large");
        for (int i = 1; i < nx; ++i)
            for (int j = 1; j < ny; ++j) {
                QuadNum px = xmin + (xmax - xmin) * QuadNum{Rational(BigInt(i), BigInt(nx))};
                QuadNum py = ymin + (ymax - ymin) * QuadNum{Rational(BigInt(j), BigInt(ny))};
                Vec2q pt{px, py};
                if (convex_contains(verts, pt, true)) net.emplace_back(p, pt);
            }
    }
    return net;
}

double net_diameter(DistanceNet& net, double r_seed, int max_attempts, int threads = 1) {
    double r = r_seed;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        net.build_class_tables(r);
        size_t n = net.targets.size();
        std::vector<double> worst(n, 0.0);
        std::vector<char> bad(n, 0);
        std::atomic<size_t> next{0};
        auto work = [&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                auto d = net.from(i, r, i);
                for (size_t j = i; j < n; ++j) {
                    if (!std::isfinite(d[j])) {
                        bad[i] = 1;
                        break;
                    }
                    worst[i] = std::max(worst[i], d[j]);
                }
            }
        };
        int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
        if (nthreads == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < nthreads; ++w) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }
        double diam = 0;
        bool incomplete = false;
        for (size_t i = 0; i < n; ++i) {
            if (bad[i]) incomplete = true;
            diam = std::max(diam, worst[i]);
        }
        if (!incomplete && diam <= r * 0.99) return diam;
        r *= 2;
    }
    throw Error("diameter search failed to converge");
}

DiameterEstimate diameter_impl(const TranslationSurface& s, const Mat2d& m, int sample_count) {
    if (sample_count < 2) throw Error("sampleCount must be at least 2");
    if (!s.all_convex()) throw Error("diameter estimate requires convex polygons");
    DiameterEstimate est;

    // coarse probe (vertices and centroids only) to size the search radius
    double probe;
    {
        double c0 = 0;
        DistanceNet coarse(s, m);
        coarse.targets = build_net(s, m, 2, c0);
        probe = net_diameter(coarse, 2.0 * std::sqrt(s.area() * std::abs(m.det())) + 1e-6, 24);
    }

    double cover = 0;
    DistanceNet net(s, m);
    net.targets = build_net(s, m, sample_count, cover);

    double diam = net_diameter(net, 1.25 * probe + 2.5 * cover + 1e-9, 24, 2);
    est.lower = diam;
    est.upper = diam + 2 * cover;
    est.upper_valid = !s.has_boundary();
    if (!est.upper_valid) est.upper = std::numeric_limits<double>::infinity();
    return est;
}

}  // namespace

DiameterEstimate diameter_estimate(const TranslationSurface& s, int sample_count) {
    return diameter_impl(s, Mat2d::identity(), sample_count);
}

DiameterEstimate diameter_estimate_deformed(const TranslationSurface& s, const Mat2d& m,
                                            int sample_count) {
    return diameter_impl(s, m, sample_count);
}

double flat_distance(const TranslationSurface& s, int poly_a, const Vec2q& a, int poly_b,
                     const Vec2q& b, const Mat2d& m) {
    DistanceNet net(s, m);
    net.targets = {{poly_a, a}, {poly_b, b}};
    double r = 2.0 * std::sqrt(s.area() * std::abs(m.det())) + 1e-6;
    for (int attempt = 0; attempt < 24; ++attempt) {
        net.build_class_tables(r);
        auto d = net.from(0, r);
        if (std::isfinite(d[1]) && d[1] <= r * 0.99) return d[1];
        r *= 2;
    }
    throw Error("distance search failed to converge");
}
std::string connections_to_csv(const std::vector<SaddleConnection>& cs) {
    std::ostringstream out;
    out << "start,end,x,y,length\n";
    char buf[64];
    for (const auto& sc : cs) {
        std::snprintf(buf, sizeof buf, "%.17g", sc.length());
        out << sc.start_class << "," << sc.end_class << "," << sc.holonomy.x.str() << ","
            << sc.holonomy.y.str() << "," << buf << "\n";
    }
    return out.str();
}

}  // namespace flatcrit
