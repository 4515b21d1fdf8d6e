#include "flatcrit/flow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace flatcrit {

namespace {

Trajectory from_exact(const ExactTrajectory& tr, double dir_len) {
    Trajectory out;
    // a budget expiring exactly on an edge is an ordinary completion
    out.status = tr.status == TraceStatus::BudgetOnEdge ? TraceStatus::Completed : tr.status;
    out.length = tr.tau_total.to_double() * dir_len;
    out.end_poly = tr.end_poly;
    if (tr.end_poly >= 0) {
        out.end_x = tr.end_point.xd();
        out.end_y = tr.end_point.yd();
    }
    for (const auto& st : tr.steps)
        out.segments.push_back({st.poly, st.entry.xd(), st.entry.yd(), st.exit.xd(),
                                st.exit.yd()});
    return out;
}

QuadNum tau_budget_for(const Vec2q& dir, double length) {
    double dn = dir.length();
    return QuadNum(Rational::from_double(length / dn));
}

}  // namespace

Trajectory trace(const TranslationSurface& s, int poly, const Vec2q& start, const Vec2q& dir,
                 double length, bool record_segments) {
    if (dir.is_zero()) throw Error("zero direction");
    if (!(length >= 0)) throw Error("length must be nonnegative");
    auto tr = trace_ray_exact(s, poly, start, dir, tau_budget_for(dir, length),
                              record_segments);
    return from_exact(tr, dir.length());
}

Trajectory trace_approx(const TranslationSurface& s, int poly, double sx, double sy, double dx,
                        double dy, double length, bool record_segments) {
    auto tr = trace_ray_approx(s, poly, sx, sy, dx, dy, length, record_segments);
    Trajectory out;
    out.status = tr.status;
    out.length = tr.length;
    out.end_poly = tr.end_poly;
    out.end_x = tr.end_x;
    out.end_y = tr.end_y;
    out.segments = tr.steps;
    return out;
}

IET first_return_iet(const TranslationSurface& s, EdgeRef transversal, const Vec2q& dir,
                     double max_length) {
    if (!s.edge_is_glued(transversal.poly, transversal.edge))
        throw Error("transversal must be a glued edge");
    Vec2q evec = s.edge_vector(transversal.poly, transversal.edge);
    if (cross_sign(evec, dir) == 0) throw Error("transversal not transverse to the direction");
    EdgeRef partner = s.partner(transversal.poly, transversal.edge);
    QuadNum tau_budget = tau_budget_for(dir, max_length);
    Vec2q e_start = s.vertex(transversal.poly, transversal.edge);
    QuadNum en2 = evec.norm2();

    auto param_of = [&](int poly, int edge, const Vec2q& point) -> QuadNum {
        // edge parameter of a crossing, expressed on the transversal side
        if (poly == transversal.poly && edge == transversal.edge)
            return dot(point - e_start, evec) / en2;
        Vec2q moved = point + s.gluing_shift(poly, edge);
        return dot(moved - e_start, evec) / en2;
    };

    // breakpoints: first backward hit of every cone-point germ
    std::vector<QuadNum> breaks = {QuadNum(0), QuadNum(1)};
    std::set<std::string> seen = {breaks[0].str(), breaks[1].str()};
    auto add_break = [&](const QuadNum& u) {
        if (u.sign() <= 0 || (u - QuadNum(1)).sign() >= 0) return;
        if (seen.insert(u.str()).second) breaks.push_back(u);
    };
    for (int c = 0; c < s.num_vertex_classes(); ++c) {
        for (auto [p, v] : s.cone_point(c).corners) {
            if (!s.corner_wedge_contains_strict(p, v, -dir)) continue;
            auto tr = trace_from_vertex(s, p, v, -dir, tau_budget, true);
            for (const auto& st : tr.steps) {
                if (st.exit_edge < 0) continue;
                EdgeRef here{st.poly, st.exit_edge};
                if (here == transversal || here == partner) {
                    add_break(param_of(st.poly, st.exit_edge, st.exit));
                    break;  // only the first backward crossing is a discontinuity
                }
            }
        }
    }
    std::sort(breaks.begin(), breaks.end(),
              [](const QuadNum& a, const QuadNum& b) { return (a - b).sign() < 0; });

    double elen = std::sqrt(en2.to_double());
    IET iet;
    struct Image {
        QuadNum start;
        int index;
    };
    std::vector<Image> images;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        QuadNum lo = breaks[i], hi = breaks[i + 1];
        QuadNum mid = (lo + hi) / QuadNum(2);
        Vec2q start = e_start + evec * mid;
        auto tr = trace_ray_exact(s, transversal.poly, start, dir, tau_budget, true);
        std::optional<QuadNum> image_mid;
        for (const auto& st : tr.steps) {
            if (st.exit_edge < 0) continue;
            EdgeRef here{st.poly, st.exit_edge};
            if (here == transversal || here == partner) {
                image_mid = param_of(st.poly, st.exit_edge, st.exit);
                break;
            }
        }
        if (!image_mid) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "non-returning subinterval [%.6f, %.6f]",
                          lo.to_double(), hi.to_double());
            throw Error(buf);
        }
        QuadNum offset = *image_mid - mid;
        iet.lengths.push_back((hi - lo).to_double() * elen);
        images.push_back({lo + offset, static_cast<int>(i)});
    }
    iet.total = elen;

    // the mapped intervals must tile the transversal exactly
    std::sort(images.begin(), images.end(),
              [](const Image& a, const Image& b) { return (a.start - b.start).sign() < 0; });
    iet.permutation.assign(iet.lengths.size(), -1);
    QuadNum cursor(0);
    for (size_t rank = 0; rank < images.size(); ++rank) {
        int idx = images[rank].index;
        iet.permutation[idx] = static_cast<int>(rank);
        if (!(images[rank].start == cursor))
            throw Error("return map images do not tile the transversal");
        cursor += breaks[idx + 1] - breaks[idx];
        iet.image_starts.push_back(images[rank].start.to_double() * elen);
    }
    if (!(cursor == QuadNum(1))) throw Error("return map images do not tile the transversal");
    return iet;
}

namespace {

double segment_integral(const Observable& f, double x0, double y0, double x1, double y1) {
    double len = std::hypot(x1 - x0, y1 - y0);
    if (len == 0) return 0;
    auto strip = [&](double c0, double c1) {
        if (c0 == c1) return (c0 >= f.a && c0 < f.b) ? len : 0.0;
        double lo = std::min(c0, c1), hi = std::max(c0, c1);
        double overlap = std::min(hi, f.b) - std::max(lo, f.a);
        return overlap > 0 ? len * overlap / (hi - lo) : 0.0;
    };
    auto trig = [&](double c0, double c1, bool use_cos) {
        double w = 2 * 3.14159265358979323846 * f.harmonic;
        if (c0 == c1) return (use_cos ? std::cos(w * c0) : std::sin(w * c0)) * len;
        double scale = len / (w * (c1 - c0));
        if (use_cos) return scale * (std::sin(w * c1) - std::sin(w * c0));
        return scale * (std::cos(w * c0) - std::cos(w * c1));
    };
    switch (f.kind) {
        case ObservableKind::One: return len;
        case ObservableKind::StripX: return strip(x0, x1);
        case ObservableKind::StripY: return strip(y0, y1);
        case ObservableKind::CosX: return trig(x0, x1, true);
        case ObservableKind::SinX: return trig(x0, x1, false);
        case ObservableKind::CosY: return trig(y0, y1, true);
        case ObservableKind::SinY: return trig(y0, y1, false);
    }
    return 0;
}

template <typename Fn>
void parallel_over(int n, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace

BirkhoffResult birkhoff_average(const TranslationSurface& s, const Vec2q& dir,
                                const Observable& f, double time_budget,
                                const std::vector<std::pair<int, Vec2q>>& starts, int threads) {
    if (!(time_budget > 0)) throw Error("time budget must be positive");
    BirkhoffResult res;
    res.averages.assign(starts.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<char> bad(starts.size(), 0);

    parallel_over(static_cast<int>(starts.size()), threads, [&](int i) {
        ExactTrajectory tr;
        try {
            tr = trace_ray_exact(s, starts[i].first, starts[i].second, dir,
                                 tau_budget_for(dir, time_budget), true);
        } catch (const Error&) {
            bad[i] = 1;
            return;
        }
        if (tr.status != TraceStatus::Completed && tr.status != TraceStatus::BudgetOnEdge) {
            bad[i] = 1;
            return;
        }
        double total = 0, traced = 0;
        for (const auto& st : tr.steps) {
            double x0 = st.entry.xd(), y0 = st.entry.yd();
            double x1 = st.exit.xd(), y1 = st.exit.yd();
            total += segment_integral(f, x0, y0, x1, y1);
            traced += std::hypot(x1 - x0, y1 - y0);
        }
        res.averages[i] = total / traced;
    });
    for (size_t i = 0; i < starts.size(); ++i)
        if (bad[i]) res.flagged.push_back(static_cast<int>(i));
    for (size_t i = 0; i < starts.size(); ++i)
        for (size_t j = i + 1; j < starts.size(); ++j)
            if (!bad[i] && !bad[j])
                res.dispersion =
                    std::max(res.dispersion, std::abs(res.averages[i] - res.averages[j]));
    return res;
}

EquidistResult equidistribution_test(const TranslationSurface& s, const Vec2q& dir, int poly,
                                     const Vec2q& start, double time_budget, int bins) {
    if (bins < 1) throw Error("bins must be positive");
    if (!s.all_convex()) throw Error("equidistribution test requires convex polygons");
    EquidistResult res;
    res.bins = bins;

    QuadNum xmin = s.vertex(0, 0).x, xmax = xmin, ymin = s.vertex(0, 0).y, ymax = ymin;
    for (int p = 0; p < s.num_polygons(); ++p)
        for (const auto& v : s.polygon(p)) {
            if ((v.x - xmin).sign() < 0) xmin = v.x;
            if ((v.x - xmax).sign() > 0) xmax = v.x;
            if ((v.y - ymin).sign() < 0) ymin = v.y;
            if ((v.y - ymax).sign() > 0) ymax = v.y;
        }
    double x0 = xmin.to_double(), x1 = xmax.to_double();
    double y0 = ymin.to_double(), y1 = ymax.to_double();
    double wx = (x1 - x0) / bins, wy = (y1 - y0) / bins;

    res.area_fraction.assign(bins * bins, 0.0);
    double total_area = s.area();
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j) {
            QuadNum cx0 = xmin + (xmax - xmin) * QuadNum(Rational(BigInt(i), BigInt(bins)));
            QuadNum cx1 = xmin + (xmax - xmin) * QuadNum(Rational(BigInt(i + 1), BigInt(bins)));
            QuadNum cy0 = ymin + (ymax - ymin) * QuadNum(Rational(BigInt(j), BigInt(bins)));
            QuadNum cy1 = ymin + (ymax - ymin) * QuadNum(Rational(BigInt(j + 1), BigInt(bins)));
            std::vector<Vec2q> cell = {{cx0, cy0}, {cx1, cy0}, {cx1, cy1}, {cx0, cy1}};
            double acc = 0;
            for (int p = 0; p < s.num_polygons(); ++p) {
                auto inter = convex_clip(cell, s.polygon(p));
                if (!inter.empty()) acc += polygon_area2(inter).to_double();
            }
            res.area_fraction[i * bins + j] = acc / total_area;
        }

    auto tr = trace_ray_exact(s, poly, start, dir, tau_budget_for(dir, time_budget), true);
    res.status = tr.status;
    res.occupancy.assign(bins * bins, 0.0);
    double traced = 0;
    auto cell_index = [&](double x, double y) {
        int i = std::clamp(static_cast<int>((x - x0) / wx), 0, bins - 1);
        int j = std::clamp(static_cast<int>((y - y0) / wy), 0, bins - 1);
        return i * bins + j;
    };
    for (const auto& st : tr.steps) {
        double ax = st.entry.xd(), ay = st.entry.yd();
        double bx = st.exit.xd(), by = st.exit.yd();
        double len = std::hypot(bx - ax, by - ay);
        if (len == 0) continue;
        std::vector<double> ts = {0.0, 1.0};
        auto add_cuts = [&](double a, double b, double lo, double w) {
            if (a == b) return;
            for (int k = 1; k < bins; ++k) {
                double u = (lo + k * w - a) / (b - a);
                if (u > 0 && u < 1) ts.push_back(u);
            }
        };
        add_cuts(ax, bx, x0, wx);
        add_cuts(ay, by, y0, wy);
        std::sort(ts.begin(), ts.end());
        for (size_t k = 0; k + 1 < ts.size(); ++k) {
            double um = 0.5 * (ts[k] + ts[k + 1]);
            double frac = ts[k + 1] - ts[k];
            if (frac <= 0) continue;
            res.occupancy[cell_index(ax + um * (bx - ax), ay + um * (by - ay))] += frac * len;
            traced += frac * len;
        }
    }
    if (traced > 0)
        for (auto& o : res.occupancy) o /= traced;
    res.discrepancy = 0;
    for (int k = 0; k < bins * bins; ++k)
        res.discrepancy = std::max(res.discrepancy,
                                   std::abs(res.occupancy[k] - res.area_fraction[k]));
    return res;
}

std::vector<std::pair<int, Vec2q>> random_starts(const TranslationSurface& s, int count,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> areas;
    for (int p = 0; p < s.num_polygons(); ++p)
        areas.push_back(polygon_area2(s.polygon(p)).to_double());
    std::discrete_distribution<int> pick(areas.begin(), areas.end());

    std::vector<std::pair<int, Vec2q>> out;
    while (static_cast<int>(out.size()) < count) {
        int p = pick(rng);
        const auto& poly = s.polygon(p);
        double bx0 = poly[0].xd(), bx1 = bx0, by0 = poly[0].yd(), by1 = by0;
        for (const auto& v : poly) {
            bx0 = std::min(bx0, v.xd());
            bx1 = std::max(bx1, v.xd());
            by0 = std::min(by0, v.yd());
            by1 = std::max(by1, v.yd());
        }
        std::uniform_real_distribution<double> ux(bx0, bx1), uy(by0, by1);
        Vec2q cand{QuadNum(Rational::from_double(ux(rng))),
                   QuadNum(Rational::from_double(uy(rng)))};
        if (convex_contains(poly, cand, true)) out.emplace_back(p, cand);
    }
    return out;
}

double escape_mass_estimate(const TranslationSurface& s, const Vec2q& dir, double time_budget,
                            int sample_count, std::uint64_t seed, int threads) {
    if (sample_count < 1) throw Error("sampleCount must be positive");
    if (!s.has_boundary()) return 0.0;
    if (!(time_budget > 0)) return 0.0;
    auto starts = random_starts(s, sample_count, seed);
    QuadNum budget = tau_budget_for(dir, time_budget);
    std::vector<char> escaped(sample_count, 0);
    parallel_over(sample_count, threads, [&](int i) {
        try {
            auto tr = trace_ray_exact(s, starts[i].first, starts[i].second, dir, budget, false);
            escaped[i] = tr.status == TraceStatus::Escaped;
        } catch (const Error&) {
            escaped[i] = 0;  // singular start: not an escape
        }
    });
    int n = 0;
    for (char e : escaped) n += e;
    return static_cast<double>(n) / sample_count;
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "segment,polygon,entry_x,entry_y,exit_x,exit_y\n";
    char buf[160];
    for (size_t i = 0; i < traj.segments.size(); ++i) {
        const auto& st = traj.segments[i];
        std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,%.17g,%.17g\n", i, st.poly,
                      st.entry_x, st.entry_y, st.exit_x, st.exit_y);
        out << buf;
    }
    return out.str();
}

std::string histogram_to_json(const EquidistResult& r) {
    std::ostringstream out;
    char buf[48];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "{\n  \"bins\": " << r.bins << ",\n  \"discrepancy\": " << num(r.discrepancy)
        << ",\n  \"occupancy\": [";
    for (size_t i = 0; i < r.occupancy.size(); ++i)
        out << (i ? "," : "") << num(r.occupancy[i]);
    out << "],\n  \"area_fraction\": [";
    for (size_t i = 0; i < r.area_fraction.size(); ++i)
        out << (i ? "," : "") << num(r.area_fraction[i]);
    out << "]\n}\n";
    return out.str();
}

}  // namespace flatcrit
