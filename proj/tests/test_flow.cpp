#include <doctest.h>

#include "flatcrit/flow.hpp"
#include "flatcrit/veech.hpp"
#include "flatcrit/surface_io.hpp"

#include <cmath>
#include <random>

using namespace flatcrit;

namespace {

QuadNum q(long long n, long long d = 1) { return QuadNum(Rational(BigInt(n), BigInt(d))); }

Vec2q golden_direction() {
    // (1, phi) with phi = (1 + sqrt 5)/2
    return {QuadNum(1), QuadNum(Rational(BigInt(1), BigInt(2)),
                               Rational(BigInt(1), BigInt(2)), 5)};
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("periodic horizontal orbit closes up") {
    TranslationSurface t = make_square_torus();
    auto traj = trace(t, 0, {q(1, 2), q(1, 2)}, {q(1), q(0)}, 2.0);
    CHECK(traj.status == TraceStatus::Completed);
    CHECK(traj.end_x == doctest::Approx(0.5));
    CHECK(traj.end_y == doctest::Approx(0.5));
    CHECK(traj.segments.size() == 3);  // 0.5 + 1 + 0.5 across two wraps
}

TEST_CASE("diagonal aimed at the corner stops at the singularity") {
    TranslationSurface t = make_square_torus();
    auto traj = trace(t, 0, {q(1, 2), q(1, 2)}, {q(1), q(1)}, 10.0);
    CHECK(traj.status == TraceStatus::HitSingularity);
    CHECK(traj.length == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
}

TEST_CASE("reversibility: exact kind returns exactly, approximate within 1e-9") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<long long> coord(1, 97);
    std::uniform_int_distribution<long long> comp(-7, 7);
    for (const auto& s : {make_square_torus(), make_regular_octagon()}) {
        int done = 0;
        while (done < 60) {
            Vec2q start{q(coord(rng), 101), q(coord(rng), 103)};
            if (!convex_contains(s.polygon(0), start, true)) continue;
            Vec2q dir{q(comp(rng)), q(comp(rng))};
            if (dir.is_zero()) continue;
            double len = 3.0;
            ExactTrajectory fwd;
            try {
                fwd = trace_ray_exact(s, 0, start, dir,
                                      QuadNum(Rational::from_double(len / dir.length())));
            } catch (const Error&) {
                continue;
            }
            if (fwd.status != TraceStatus::Completed) continue;
            auto back = trace_ray_exact(s, fwd.end_poly, fwd.end_point, -dir, fwd.tau_total);
            REQUIRE(back.status == TraceStatus::Completed);
            CHECK(back.end_poly == 0);
            CHECK(back.end_point == start);  // exact return
            ++done;
        }

        // approximate kind
        std::uniform_real_distribution<double> u(0.05, 0.3);
        std::uniform_real_distribution<double> a(0, 2 * 3.14159265);
        int adone = 0;
        while (adone < 60) {
            double sx = 0.4 + u(rng) * 0.3, sy = 0.3 + u(rng) * 0.3;
            double ang = a(rng);
            auto fwd = trace_approx(s, 0, sx, sy, std::cos(ang), std::sin(ang), 3.0);
            if (fwd.status != TraceStatus::Completed) continue;
            auto back = trace_approx(s, fwd.end_poly, fwd.end_x, fwd.end_y, -std::cos(ang),
                                     -std::sin(ang), fwd.length);
            if (back.status != TraceStatus::Completed) continue;
            CHECK(std::hypot(back.end_x - sx, back.end_y - sy) < 1e-9);
            ++adone;
        }
    }
}

TEST_CASE("first return map in the golden direction is the golden rotation") {
    TranslationSurface t = make_square_torus();
    auto iet = first_return_iet(t, {0, 0}, golden_direction(), 50.0);
    REQUIRE(iet.lengths.size() == 2);
    double phi = (1 + std::sqrt(5.0)) / 2;
    CHECK(iet.lengths[0] == doctest::Approx(1 - 1 / phi).epsilon(1e-9));
    CHECK(iet.lengths[1] == doctest::Approx(1 / phi).epsilon(1e-9));
    CHECK(iet.permutation == std::vector<int>{1, 0});
}

TEST_CASE("vertical first return is the identity") {
    TranslationSurface t = make_square_torus();
    auto iet = first_return_iet(t, {0, 0}, {q(0), q(1)}, 10.0);
    REQUIRE(iet.lengths.size() == 1);
    CHECK(iet.lengths[0] == doctest::Approx(1.0));
    CHECK(iet.permutation == std::vector<int>{0});
}

TEST_CASE("slope-2 first return is rotation by one half") {
    TranslationSurface t = make_square_torus();
    auto iet = first_return_iet(t, {0, 0}, {q(1), q(2)}, 10.0);
    REQUIRE(iet.lengths.size() == 2);
    CHECK(iet.lengths[0] == doctest::Approx(0.5));
    CHECK(iet.lengths[1] == doctest::Approx(0.5));
    CHECK(iet.permutation == std::vector<int>{1, 0});
}

TEST_CASE("iet is a measure-preserving bijection") {
    TranslationSurface t = make_square_torus();
    auto iet = first_return_iet(t, {0, 0}, golden_direction(), 50.0);
    std::vector<double> cum = {0};
    for (double l : iet.lengths) cum.push_back(cum.back() + l);
    auto apply = [&](double x) {
        for (size_t i = 0; i < iet.lengths.size(); ++i)
            if (x < cum[i + 1] || i + 1 == iet.lengths.size())
                return iet.image_starts[iet.permutation[i]] + (x - cum[i]);
        return x;
    };
    const int n = 10000;
    std::vector<double> images;
    for (int i = 0; i < n; ++i) {
        double x = (i + 0.5) / n * iet.total;
        images.push_back(apply(apply(x)));
    }
    std::sort(images.begin(), images.end());
    for (int i = 0; i + 1 < n; ++i) CHECK(images[i + 1] - images[i] > 1e-12);
    // pushforward of uniform stays uniform (Kolmogorov-Smirnov)
    double ks = 0;
    for (int i = 0; i < n; ++i)
        ks = std::max(ks, std::abs(images[i] / iet.total - (i + 0.5) / n));
    CHECK(ks <= 0.02);
}

TEST_CASE("iet non-return reports the offending subinterval") {
    auto cham = chamanara_surface(2);
    CHECK_THROWS_WITH_AS(first_return_iet(cham, {0, 0}, {q(0), q(1)}, 0.4),
                         doctest::Contains("non-returning"), Error);
}

TEST_CASE("birkhoff averages: golden direction equidistributes") {
    TranslationSurface t = make_square_torus();
    auto starts = random_starts(t, 6, 12345);
    auto res = birkhoff_average(t, golden_direction(), Observable::strip_x(0.0, 0.5), 3000.0,
                                starts, 2);
    CHECK(res.flagged.empty());
    for (double avg : res.averages) CHECK(std::abs(avg - 0.5) < 0.02);
    CHECK(res.dispersion < 0.04);
}

TEST_CASE("birkhoff: constant observable averages to one, exactly") {
    TranslationSurface t = make_square_torus();
    auto res = birkhoff_average(t, golden_direction(), Observable::one(), 100.0,
                                {{0, {q(1, 3), q(1, 7)}}});
    CHECK(res.averages[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("birkhoff: periodic diagonal spends half its time in the strip") {
    TranslationSurface t = make_square_torus();
    double period = std::sqrt(2.0);
    auto res = birkhoff_average(t, {q(1), q(1)}, Observable::strip_x(0.0, 0.5), 10 * period,
                                {{0, {q(0, 1), q(1, 4)}}});
    // start (0, 1/4) sits on the left edge; the orbit closes after sqrt(2)
    CHECK(res.flagged.empty());
    CHECK(res.averages[0] == doctest::Approx(0.5).epsilon(1e-9));
    // averages stay within the observable's range
    CHECK(res.averages[0] >= 0.0);
    CHECK(res.averages[0] <= 1.0);
}

TEST_CASE("equidistribution discrepancies separate ergodic from periodic") {
    TranslationSurface t = make_square_torus();
    auto gold = equidistribution_test(t, golden_direction(), 0, {q(2, 7), q(3, 11)}, 3000.0, 10);
    CHECK(gold.discrepancy <= 0.05);

    auto diag = equidistribution_test(t, {q(1), q(1)}, 0, {q(0, 1), q(1, 4)}, 3000.0, 10);
    CHECK(diag.discrepancy >= 0.03);  // a closed line has zero area
    CHECK(diag.discrepancy > 3 * gold.discrepancy);

    auto tiny = equidistribution_test(t, golden_direction(), 0, {q(2, 7), q(3, 11)}, 1e-9, 10);
    CHECK(tiny.discrepancy == doctest::Approx(0.99).epsilon(1e-6));
}

TEST_CASE("chamanara construction: gluing counts, area, remainders") {
    auto c1 = chamanara_surface(1);
    CHECK(c1.validate().ok());
    CHECK(c1.area_exact() == QuadNum(1));
    int glued = 0, boundary = 0;
    for (int e = 0; e < c1.num_edges(0); ++e) {
        if (c1.edge_is_glued(0, e)) ++glued;
        if (c1.edge_is_boundary(0, e)) ++boundary;
    }
    CHECK(glued == 4);  // 2 gluing pairs
    CHECK(boundary == 4);
    // each remainder has length 1/2 at level 1
    for (int e = 0; e < c1.num_edges(0); ++e)
        if (c1.edge_is_boundary(0, e))
            CHECK(c1.edge_vector(0, e).norm2() == QuadNum(Rational(BigInt(1), BigInt(4))));

    for (int level : {2, 3, 5}) {
        auto c = chamanara_surface(level);
        CHECK(c.validate().ok());
        CHECK(c.area_exact() == QuadNum(1));
    }
}

TEST_CASE("chamanara vertex classes chain to the truncation boundary") {
    // the identification graph is four paths (4N links over 4N+4 corners with
    // degree at most two), each ending at a remainder endpoint, so every
    // class carries the boundary flag; interior classes would require cycles
    for (int level : {1, 3, 5}) {
        auto c = chamanara_surface(level);
        CHECK(c.num_vertex_classes() == 4);
        for (const auto& cone : c.cone_angles()) CHECK(cone.boundary);
    }
}

TEST_CASE("chamanara diagonal from the center leaves through the truncation") {
    auto c = chamanara_surface(3);
    auto traj = trace(c, 0, {q(1, 2), q(1, 2)}, {q(1), q(1)}, 100.0);
    CHECK(traj.status == TraceStatus::Escaped);
    CHECK(traj.length < 100.0);
}

TEST_CASE("escape outputs are independent of the thread count") {
    auto c = chamanara_surface(4);
    double f1 = escape_mass_estimate(c, {q(1), q(1)}, 25.0, 120, 99, 1);
    double f2 = escape_mass_estimate(c, {q(1), q(1)}, 25.0, 120, 99, 2);
    CHECK(f1 == f2);
}

TEST_CASE("escape fraction is nondecreasing in the horizon") {
    auto c = chamanara_surface(4);
    double f10 = escape_mass_estimate(c, {q(1), q(1)}, 10.0, 200, 5);
    double f40 = escape_mass_estimate(c, {q(1), q(1)}, 40.0, 200, 5);
    CHECK(f40 >= f10);
}

TEST_CASE("chamanara fixture file round-trips exactly") {
    auto c = chamanara_surface(5);
    auto back = parse_surface(write_surface(c));
    CHECK(write_surface(back) == write_surface(c));
    CHECK(back.num_vertex_classes() == c.num_vertex_classes());
}

TEST_CASE("escape mass: zero horizon, closed surface, geometric decay") {
    auto c4 = chamanara_surface(4);
    CHECK(escape_mass_estimate(c4, {q(1), q(1)}, 0.0, 10, 1) == 0.0);
    TranslationSurface t = make_square_torus();
    CHECK(escape_mass_estimate(t, {q(1), q(1)}, 10.0, 10, 1) == 0.0);

    double prev = -1;
    for (int level : {3, 4, 5}) {
        auto c = chamanara_surface(level);
        double frac = escape_mass_estimate(c, {q(1), q(1)}, 30.0, 300, 777, 2);
        CHECK(frac <= 8.0 * std::pow(2.0, -level) + 0.05);
        if (prev >= 0) CHECK(frac <= prev + 1e-12);  // nonincreasing in the level
        prev = frac;
    }
}

TEST_CASE("baker certificate on the truncated surface: passes off the top level") {
    auto c = chamanara_surface(5);
    Mat2q baker(QuadNum(2), QuadNum(0), QuadNum(0), QuadNum(Rational(BigInt(1), BigInt(2))));
    auto cert = generate_certificate(c, baker);
    auto rep = verify_affine_automorphism(c, cert);
    for (const auto& f : rep.failures) MESSAGE(f);
    CHECK(rep.pass());
    CHECK_FALSE(rep.truncated.empty());  // the deepest level maps into the cut-off tail
}

TEST_CASE("chamanara horizontal direction has no cylinders within bound 4") {
    auto c = chamanara_surface(5);
    auto dec = cylinder_decomposition(c, {q(1), q(0)}, 4.0);
    CHECK(dec.cylinders.empty());
    CHECK(dec.residual);
}

TEST_CASE("trajectory csv and histogram json") {
    TranslationSurface t = make_square_torus();
    auto traj = trace(t, 0, {q(1, 2), q(1, 2)}, {q(1), q(0)}, 2.0);
    std::string csv = trajectory_to_csv(traj);
    CHECK(csv.rfind("segment,polygon,", 0) == 0);
    auto r = equidistribution_test(t, golden_direction(), 0, {q(2, 7), q(3, 11)}, 10.0, 3);
    std::string json = histogram_to_json(r);
    CHECK(json.find("\"discrepancy\"") != std::string::npos);
}

}  // TEST_SUITE
