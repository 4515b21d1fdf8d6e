#include <doctest.h>

#include "flatcrit/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace flatcrit;

namespace {

// Independent oracle: oriented primitive lattice vectors (p, q) with
// p^2 + q^2 <= L^2, counted by brute force.
int primitive_lattice_count(double bound) {
    int r = static_cast<int>(std::floor(bound)) + 1;
    int count = 0;
    for (int p = -r; p <= r; ++p)
        for (int q = -r; q <= r; ++q) {
            if (p == 0 && q == 0) continue;
            if (std::gcd(std::abs(p), std::abs(q)) != 1) continue;
            if (static_cast<double>(p) * p + static_cast<double>(q) * q <= bound * bound + 1e-12)
                ++count;
        }
    return count;
}

}  // namespace

TEST_SUITE("saddle") {

TEST_CASE("torus enumeration matches the primitive lattice oracle") {
    TranslationSurface t = make_square_torus();
    for (double bound : {1.5, 3.0, 5.0, 8.0}) {
        auto res = enumerate_saddle_connections(t, bound);
        CHECK_FALSE(res.truncation_warning);
        CHECK(static_cast<int>(res.connections.size()) == primitive_lattice_count(bound));
    }
}

TEST_CASE("torus short bounds: 8 connections at 1.5, none at 0.5") {
    TranslationSurface t = make_square_torus();
    CHECK(enumerate_saddle_connections(t, 1.5).connections.size() == 8);
    CHECK(enumerate_saddle_connections(t, 0.5).connections.empty());
}

TEST_CASE("octagon at 1.01: the four side classes, both orientations") {
    TranslationSurface oct = make_regular_octagon();
    auto res = enumerate_saddle_connections(oct, 1.01);
    CHECK(res.connections.size() == 8);
    for (const auto& sc : res.connections) CHECK(sc.length() == doctest::Approx(1.0));
    // next-shortest connection has length sqrt(2 + sqrt 2) ~ 1.8478
    auto more = enumerate_saddle_connections(oct, 1.85);
    bool found_diag = false;
    for (const auto& sc : more.connections)
        if (sc.length() > 1.5) {
            found_diag = true;
            CHECK(sc.length() == doctest::Approx(std::sqrt(2 + std::sqrt(2.0))).epsilon(1e-12));
        }
    CHECK(found_diag);
}

TEST_CASE("doubling stability: enumerate(L) is a length-prefix of enumerate(2L)") {
    for (const auto& s : {make_square_torus(), make_regular_octagon()}) {
        auto small = enumerate_saddle_connections(s, 3.0).connections;
        auto big = enumerate_saddle_connections(s, 6.0).connections;
        REQUIRE(big.size() >= small.size());
        for (size_t i = 0; i < small.size(); ++i) {
            CHECK(small[i].holonomy == big[i].holonomy);
            CHECK(small[i].start_class == big[i].start_class);
            CHECK(small[i].end_class == big[i].end_class);
        }
    }
}

TEST_CASE("orientation pairing: connections come in +/- pairs") {
    for (const auto& s : {make_square_torus(), make_regular_octagon()}) {
        auto res = enumerate_saddle_connections(s, 4.0);
        std::multiset<std::string> keys;
        for (const auto& sc : res.connections)
            keys.insert(sc.holonomy.x.str() + "|" + sc.holonomy.y.str() + "|" +
                        std::to_string(sc.start_class) + "|" + std::to_string(sc.end_class));
        for (const auto& sc : res.connections) {
            Vec2q neg = -sc.holonomy;
            std::string rev = neg.x.str() + "|" + neg.y.str() + "|" +
                              std::to_string(sc.end_class) + "|" + std::to_string(sc.start_class);
            CHECK(keys.count(rev) == 1);
        }
    }
}

TEST_CASE("enumeration equivariance under an exact shear") {
    TranslationSurface t = make_square_torus();
    Mat2q shear(QuadNum(1), QuadNum(1), QuadNum(0), QuadNum(1));
    TranslationSurface ts = t.apply_matrix(shear);
    double bound = 3.0;
    auto direct = enumerate_saddle_connections(ts, bound);
    // oracle: shear the base holonomies, keep those within the disk
    auto base = enumerate_saddle_connections(t, 20.0);
    std::set<std::string> expect;
    QuadNum b2{Rational::from_double(bound)};
    b2 *= b2;
    for (const auto& sc : base.connections) {
        Vec2q h = shear.apply(sc.holonomy);
        if ((h.norm2() - b2).sign() <= 0) expect.insert(h.x.str() + "|" + h.y.str());
    }
    std::set<std::string> got;
    for (const auto& sc : direct.connections)
        got.insert(sc.holonomy.x.str() + "|" + sc.holonomy.y.str());
    CHECK(got == expect);
}

TEST_CASE("shortest saddle connection") {
    TranslationSurface t = make_square_torus();
    auto [len, sc] = shortest_saddle_connection(t);
    CHECK(len == doctest::Approx(1.0));

    // deformed by g_{ln 2}: the short vector is (1,0) scaled to 0.5
    auto [dlen, dsc] = shortest_saddle_connection_deformed(t, Mat2d::geodesic(std::log(2.0)));
    CHECK(dlen == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dsc.holonomy.y.is_zero());

    TranslationSurface oct = make_regular_octagon();
    auto [olen, osc] = shortest_saddle_connection(oct);
    CHECK(olen == doctest::Approx(1.0));
}

TEST_CASE("systole estimate: torus and octagon") {
    TranslationSurface t = make_square_torus();
    auto est = systole_estimate(t, 1.6);
    CHECK(est.lower_proxy == doctest::Approx(1.0));
    CHECK(est.closed_curve_upper == doctest::Approx(1.0));

    TranslationSurface oct = make_regular_octagon();
    auto oest = systole_estimate(oct, 1.2);
    CHECK(oest.lower_proxy == doctest::Approx(1.0));
    // every octagon connection is a loop at the single cone point
    CHECK(oest.closed_curve_upper == doctest::Approx(1.0));
    CHECK(oest.lower_proxy <= oest.closed_curve_upper + 1e-12);
}

TEST_CASE("systole estimate on the deformed torus and precondition checks") {
    // exact deformation by diag(1/2, 2): spec's deformed lattice example
    TranslationSurface t = make_square_torus();
    Mat2q g(QuadNum(Rational(BigInt(1), BigInt(2))), QuadNum(0), QuadNum(0), QuadNum(2));
    TranslationSurface td = t.apply_matrix(g);
    auto est = systole_estimate(td, 0.8);
    CHECK(est.lower_proxy == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(est.closed_curve_upper == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(est.lower_proxy <= est.closed_curve_upper + 1e-15);

    CHECK_THROWS_AS(systole_estimate(t, 0.5), Error);  // bound below the shortest
}

TEST_CASE("exact flat distance on the torus against the closed form") {
    TranslationSurface t = make_square_torus();
    auto q = [](int num, int den) { return QuadNum(Rational(BigInt(num), BigInt(den))); };
    double d = flat_distance(t, 0, {q(1, 10), q(1, 10)}, 0, {q(3, 5), q(3, 5)});
    CHECK(d == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-12));

    double d2 = flat_distance(t, 0, {q(1, 10), q(1, 2)}, 0, {q(9, 10), q(1, 2)});
    CHECK(d2 == doctest::Approx(0.2).epsilon(1e-12));  // wraps around
}

TEST_CASE("diameter bracket on the unit torus") {
    // dense-grid brute-force oracle: true diameter sqrt(2)/2
    double truth = std::sqrt(2.0) / 2.0;
    {
        double worst = 0;
        int n = 40;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double x = (i + 0.5) / n, y = (j + 0.5) / n;
                double dx = std::min(x, 1 - x), dy = std::min(y, 1 - y);
                worst = std::max(worst, std::hypot(dx, dy));
            }
        CHECK(worst <= truth + 1e-9);
        CHECK(worst >= truth - 0.05);
    }
    TranslationSurface t = make_square_torus();
    auto est = diameter_estimate(t, 8000);
    CHECK(est.lower >= 0.70);
    CHECK(est.lower <= truth + 1e-9);
    CHECK(est.upper <= 0.75);
    CHECK(est.upper >= truth - 1e-9);
}

TEST_CASE("diameter of the g_{ln2}-deformed torus brackets the oracle") {
    // oracle on the 0.5 x 2 torus: half-diagonal sqrt(0.0625 + 1) ~ 1.0308
    double truth = std::sqrt(0.0625 + 1.0);
    TranslationSurface t = make_square_torus();
    auto est = diameter_estimate_deformed(t, Mat2d::geodesic(std::log(2.0)), 4000);
    CHECK(est.lower >= 1.0);
    CHECK(est.lower <= truth + 1e-9);
    CHECK(est.upper >= truth - 1e-9);
    CHECK(est.upper <= 1.2);
}

TEST_CASE("diameter lower bound is valid for tiny sample counts") {
    TranslationSurface t = make_square_torus();
    auto est = diameter_estimate(t, 2);
    CHECK(est.lower > 0);
    CHECK(est.lower <= std::sqrt(2.0) / 2.0 + 1e-9);
    CHECK(est.lower <= est.upper);
}

TEST_CASE("csv export shape") {
    TranslationSurface t = make_square_torus();
    auto res = enumerate_saddle_connections(t, 1.5);
    std::string csv = connections_to_csv(res.connections);
    CHECK(csv.rfind("start,end,x,y,length\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);  // header + 8 rows
}

}  // TEST_SUITE
