#include "flatcrit/envelope.hpp"

#include "flatcrit/saddle.hpp"
#include "flatcrit/unfold.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace flatcrit {

double SystoleEnvelope::value(double t) const {
    for (const auto& p : pieces)
        if (t <= p.t1 + 1e-15) return p.value(std::max(t, p.t0));
    return pieces.empty() ? 0.0 : pieces.back().value(t);
}

double SystoleEnvelope::min_value() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) {
        best = std::min({best, p.value(p.t0), p.value(p.t1)});
        if (p.a > 0 && p.b > 0) {
            double tstar = 0.25 * std::log(p.b / p.a);  // interior minimum
            if (tstar > p.t0 && tstar < p.t1) best = std::min(best, p.value(tstar));
        }
    }
    return best;
}

double SystoleEnvelope::max_value() const {
    double best = 0;
    for (const auto& p : pieces) best = std::max({best, p.value(p.t0), p.value(p.t1)});
    return best;
}

namespace {

struct Candidate {
    double a, b;  // f(t) = b e^{-2t} + a e^{2t}
    Vec2q holonomy;
    int start_class, end_class;
};

using Pool = std::map<std::string, Candidate>;

// Components of exact holonomies in the pre-deformed frame. The critical
// near-flow-direction component cancels catastrophically in plain doubles,
// so it is resolved exactly and rounded once. Two flavors: an exact direction
// (rotated onto the horizontal axis) or a general real matrix whose entries,
// being doubles, are exact rationals.
class Frame {
public:
    static Frame from_direction(const Vec2q& d) {
        Frame f;
        f.dir_ = d;
        f.inv_norm_ = 1.0 / d.length();
        double c = d.xd() * f.inv_norm_, s = d.yd() * f.inv_norm_;
        f.approx_ = {c, s, -s, c};  // rotation taking d to the positive x-axis
        return f;
    }
    static Frame from_matrix(const Mat2d& m) {
        Frame f;
        f.approx_ = m;
        f.mat_ = {{QuadNum(Rational::from_double(m.a)), QuadNum(Rational::from_double(m.b)),
                   QuadNum(Rational::from_double(m.c)), QuadNum(Rational::from_double(m.d))}};
        return f;
    }

    std::array<double, 2> components(const Vec2q& h) const {
        if (dir_) {
            double x = dot(*dir_, h).to_double() * inv_norm_;
            double y = cross(*dir_, h).to_double() * inv_norm_;
            return {x, y};
        }
        const Mat2q& m = *mat_;
        return {(m.a * h.x + m.b * h.y).to_double(), (m.c * h.x + m.d * h.y).to_double()};
    }

    const Mat2d& approx() const { return approx_; }

private:
    std::optional<Vec2q> dir_;
    double inv_norm_ = 1.0;
    std::optional<Mat2q> mat_;
    Mat2d approx_;
};

void add_candidate(Pool& pool, const Frame& frame, const Vec2q& h, int sc, int ec) {
    std::string key = h.x.str() + "|" + h.y.str();
    if (pool.count(key)) return;
    auto v = frame.components(h);
    pool[key] = {v[1] * v[1], v[0] * v[0], h, sc, ec};
}

// Parallelogram torus: connections are the primitive vectors of the holonomy
// lattice, so windows can be enumerated through a reduced basis instead of
// developing polygon chains (which walks Theta(e^t) cells on thin windows).
struct TorusLattice {
    Vec2q u, v;
    int cls;
};

std::optional<TorusLattice> detect_torus(const TranslationSurface& s) {
    if (s.num_polygons() != 1 || s.num_edges(0) != 4 || s.has_boundary()) return std::nullopt;
    if (!(s.partner(0, 0) == EdgeRef{0, 2}) || !(s.partner(0, 1) == EdgeRef{0, 3}))
        return std::nullopt;
    return TorusLattice{s.edge_vector(0, 0), s.edge_vector(0, 1), s.vertex_class(0, 0)};
}

// All primitive lattice vectors whose g_tm-deformed frame norm is <= bound,
// via Gauss reduction of the integer basis against that quadratic form.
void lattice_candidates(const TorusLattice& lat, const Frame& frame, double tm, double bound,
                        Pool& pool) {
    double ex = std::exp(-tm), ey = std::exp(tm);
    auto comp = [&](long long p, long long q) {
        Vec2q h = lat.u * QuadNum(p) + lat.v * QuadNum(q);
        auto c = frame.components(h);
        return std::array<double, 2>{c[0] * ex, c[1] * ey};
    };
    long long a11 = 1, a12 = 0, a21 = 0, a22 = 1;
    auto gram = [&](long long x1, long long x2, long long y1, long long y2) {
        auto a = comp(x1, x2);
        auto b = comp(y1, y2);
        return a[0] * b[0] + a[1] * b[1];
    };
    for (int iter = 0; iter < 256; ++iter) {
        double na = gram(a11, a12, a11, a12);
        double nb = gram(a21, a22, a21, a22);
        if (nb < na) {
            std::swap(a11, a21);
            std::swap(a12, a22);
            std::swap(na, nb);
        }
        long long q = std::llround(gram(a11, a12, a21, a22) / na);
        if (q == 0) break;
        a21 -= q * a11;
        a22 -= q * a12;
    }
    double na = std::sqrt(gram(a11, a12, a11, a12));
    double nb = gram(a21, a22, a21, a22);
    double pr = gram(a11, a12, a21, a22);
    double nbperp = std::sqrt(std::max(nb - pr * pr / (na * na), 1e-300));
    long long ki = static_cast<long long>(std::ceil(bound / std::max(na, 1e-300))) + 1;
    long long kj = static_cast<long long>(std::ceil(bound / std::max(nbperp, 1e-300))) + 1;
    if (ki > (1 << 20) || kj > (1 << 20) || ki * kj > (1 << 22))
        throw Error("lattice window too large");
    for (long long i = -ki; i <= ki; ++i)
        for (long long j = -kj; j <= kj; ++j) {
            long long p = i * a11 + j * a21;
            long long q = i * a12 + j * a22;
            if (p == 0 && q == 0) continue;
            if (std::gcd(std::llabs(p), std::llabs(q)) != 1) continue;
            auto w = comp(p, q);
            if (w[0] * w[0] + w[1] * w[1] > bound * bound * (1 + 1e-9)) continue;
            Vec2q h = lat.u * QuadNum(p) + lat.v * QuadNum(q);
            add_candidate(pool, frame, h, lat.cls, lat.cls);
        }
}

void edge_candidates(const TranslationSurface& s, const Frame& frame, Pool& pool) {
    for (int p = 0; p < s.num_polygons(); ++p)
        for (int e = 0; e < s.num_edges(p); ++e)
            if (s.edge_is_glued(p, e))
                add_candidate(pool, frame, s.edge_vector(p, e), s.vertex_class(p, e),
                              s.vertex_class(p, (e + 1) % s.num_edges(p)));
}

void window_candidates(const TranslationSurface& s, const std::optional<TorusLattice>& lat,
                       const Frame& frame, double ta, double tb, double max_env, Pool& pool) {
    double m = std::sqrt(max_env) * (1 + 1e-9);
    if (lat) {
        lattice_candidates(*lat, frame, 0.5 * (ta + tb), m * std::exp(0.5 * (tb - ta)) * 1.01,
                           pool);
        return;
    }
    auto region = UnfoldRegion::rect(frame.approx(), m * std::exp(tb), m * std::exp(-ta));
    for (int c = 0; c < s.num_vertex_classes(); ++c) {
        bool trunc = false;
        for (auto& cand : unfold_connections(s, c, region, &trunc))
            add_candidate(pool, frame, cand.holonomy, cand.start_class, cand.end_class);
        if (trunc) throw Error("marked boundary reached during envelope enumeration");
    }
    edge_candidates(s, frame, pool);
}

// Valid upper bound for the envelope maximum over [ta, tb]: each f_v is
// convex, so its window maximum sits at an endpoint; take the best candidate.
double envelope_window_bound(const Pool& pool, double ta, double tb) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [k, c] : pool) {
        (void)k;
        double fa = c.b * std::exp(-2 * ta) + c.a * std::exp(2 * ta);
        double fb = c.b * std::exp(-2 * tb) + c.a * std::exp(2 * tb);
        best = std::min(best, std::max(fa, fb));
    }
    return best;
}

std::vector<EnvelopePiece> lower_envelope(const Pool& pool, double horizon) {
    // sweep in u = e^{2t}: curves b/u + a*u cross at most once for u > 0
    struct Curve {
        double a, b;
        const Candidate* c;
    };
    std::vector<Curve> curves;
    for (const auto& [k, c] : pool) {
        (void)k;
        bool dominated = false;
        for (const auto& o : curves)
            if (o.a <= c.a && o.b <= c.b) {
                dominated = true;
                break;
            }
        if (!dominated) curves.push_back({c.a, c.b, &c});
    }
    if (curves.empty()) throw Error("empty candidate pool");

    auto eval = [](const Curve& c, double u) { return c.b / u + c.a * u; };
    std::vector<EnvelopePiece> pieces;
    double u = 1.0;
    const double u_end = std::exp(2 * horizon);
    size_t cur = 0;
    for (size_t i = 1; i < curves.size(); ++i) {
        double ref = eval(curves[cur], u);
        double d = eval(curves[i], u) - ref;
        if (d < -1e-15 * ref || (std::abs(d) <= 1e-15 * ref && curves[i].a < curves[cur].a))
            cur = i;
    }
    int guard = 0;
    while (u < u_end && ++guard < 100000) {
        double next_u = u_end;
        size_t next_i = cur;
        for (size_t i = 0; i < curves.size(); ++i) {
            if (i == cur) continue;
            // i undercuts cur beyond u* only when flatter (a_i < a_cur) and
            // currently above (b_i > b_cur)
            double da = curves[i].a - curves[cur].a;
            double db = curves[i].b - curves[cur].b;
            if (da >= 0 || db <= 0) continue;
            double ustar = std::sqrt(db / -da);
            if (ustar > u * (1 + 1e-13) && ustar < next_u) {
                next_u = ustar;
                next_i = i;
            }
        }
        EnvelopePiece piece;
        piece.t0 = 0.5 * std::log(u);
        piece.t1 = 0.5 * std::log(next_u);
        piece.a = curves[cur].a;
        piece.b = curves[cur].b;
        piece.holonomy = curves[cur].c->holonomy;
        piece.start_class = curves[cur].c->start_class;
        piece.end_class = curves[cur].c->end_class;
        pieces.push_back(piece);
        u = next_u;
        cur = next_i;
    }
    if (!pieces.empty()) {
        pieces.front().t0 = 0;
        pieces.back().t1 = horizon;
    }
    return pieces;
}

bool envelopes_equal(const std::vector<EnvelopePiece>& x, const std::vector<EnvelopePiece>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i].t0 - y[i].t0) > 1e-9 || std::abs(x[i].t1 - y[i].t1) > 1e-9)
            return false;
        if (x[i].a != y[i].a || x[i].b != y[i].b) return false;
    }
    return true;
}

SystoleEnvelope envelope_impl(const TranslationSurface& s, double horizon, const Frame& frame) {
    if (!(horizon > 0)) throw Error("horizon must be positive");
    if (s.has_boundary())
        throw Error("marked boundary present: envelope completeness cannot be certified");
    auto lat = detect_torus(s);

    Pool pool;
    {
        auto [len, sc] = shortest_saddle_connection_deformed(s, frame.approx());
        (void)sc;
        if (lat) {
            lattice_candidates(*lat, frame, 0.0, 2 * len + 1, pool);
        } else {
            auto region = UnfoldRegion::deformed_disk(frame.approx(), 2 * len + 1);
            for (int c = 0; c < s.num_vertex_classes(); ++c)
                for (auto& cand : unfold_connections(s, c, region))
                    add_candidate(pool, frame, cand.holonomy, cand.start_class, cand.end_class);
            edge_candidates(s, frame, pool);
        }
    }

    const double window = 0.5;
    std::vector<EnvelopePiece> pieces;
    for (int round = 0; round < 32; ++round) {
        size_t before = pool.size();
        for (double ta = 0; ta < horizon; ta += window) {
            double tb = std::min(ta + window, horizon);
            window_candidates(s, lat, frame, ta, tb, envelope_window_bound(pool, ta, tb), pool);
        }
        bool grew = pool.size() > before;
        auto now = lower_envelope(pool, horizon);
        if (!grew && !pieces.empty() && envelopes_equal(pieces, now)) {
            // doubling certificate: enlarged bounds must not change anything
            size_t sz = pool.size();
            for (double ta = 0; ta < horizon; ta += window) {
                double tb = std::min(ta + window, horizon);
                double bound = envelope_window_bound(pool, ta, tb) * 4.0;
                window_candidates(s, lat, frame, ta, tb, bound, pool);
            }
            auto certified = lower_envelope(pool, horizon);
            if (pool.size() == sz && envelopes_equal(now, certified)) {
                SystoleEnvelope env;
                env.horizon = horizon;
                env.pieces = std::move(certified);
                return env;
            }
        }
        pieces = std::move(now);
    }
    throw Error("envelope fixpoint did not stabilize");
}

}  // namespace

SystoleEnvelope systole_envelope(const TranslationSurface& s, double horizon, const Mat2d* pre) {
    Frame frame = pre ? Frame::from_matrix(*pre) : Frame::from_matrix(Mat2d::identity());
    return envelope_impl(s, horizon, frame);
}

SystoleEnvelope systole_envelope_direction(const TranslationSurface& s, double horizon,
                                           const Vec2q& direction) {
    if (direction.is_zero()) throw Error("zero direction");
    return envelope_impl(s, horizon, Frame::from_direction(direction));
}

std::string envelope_to_csv(const SystoleEnvelope& env, int samples) {
    if (samples < 2) throw Error("need at least 2 samples");
    std::ostringstream out;
    out << "t,delta_prime,d_prime,integral_to_t\n";
    char buf[96];
    double integral = 0;
    double prev_t = 0, prev_v = env.value(0);
    for (int i = 0; i < samples; ++i) {
        double t = env.horizon * i / (samples - 1);
        double v = env.value(t);
        integral += 0.5 * (v + prev_v) * (t - prev_t);
        double dp = std::sqrt(v);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t, dp, -std::log(dp),
                      integral);
        out << buf;
        prev_t = t;
        prev_v = v;
    }
    return out.str();
}

}  // namespace flatcrit
