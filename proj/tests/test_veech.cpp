#include <doctest.h>

#include "flatcrit/veech.hpp"

#include <cmath>
#include <random>

using namespace flatcrit;

namespace {

Mat2d random_unit_det(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    // product of elementary shears and a geodesic factor keeps det = 1
    Mat2d m = Mat2d::shear_h(dist(rng)).mul(Mat2d::shear_v(dist(rng))).mul(
        Mat2d::geodesic(dist(rng)));
    return m;
}

AutomorphismCertificate torus_shear_certificate() {
    auto q = [](long long n, long long d = 1) {
        return QuadNum(Rational(BigInt(n), BigInt(d)));
    };
    AutomorphismCertificate cert;
    cert.matrix = Mat2q(q(1), q(1), q(0), q(1));
    CertPiece left;
    left.src_poly = 0;
    left.verts = {{q(0), q(0)}, {q(1), q(0)}, {q(1), q(1)}};
    left.shift = {q(0), q(0)};
    left.dst_poly = 0;
    CertPiece right;
    right.src_poly = 0;
    right.verts = {{q(1), q(0)}, {q(2), q(1)}, {q(1), q(1)}};
    right.shift = {q(-1), q(0)};
    right.dst_poly = 0;
    cert.pieces = {left, right};
    return cert;
}

}  // namespace

TEST_SUITE("veech") {

TEST_CASE("hyperbolic distance normalization: dist(I, g_t) = |t|") {
    for (double t = -5; t <= 5; t += 0.25)
        CHECK(hyp_distance(Mat2d::identity(), Mat2d::geodesic(t)) ==
              doctest::Approx(std::abs(t)).epsilon(1e-12));
    Mat2d a = Mat2d::shear_h(0.7);
    CHECK(hyp_distance(a, a) == doctest::Approx(0.0));
    CHECK(hyp_distance(Mat2d::identity(), Mat2d::shear_h(1.0)) ==
          doctest::Approx(0.5 * std::acosh(1.5)).epsilon(1e-12));
}

TEST_CASE("hyperbolic distance: symmetry and left-invariance") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        Mat2d a = random_unit_det(rng), b = random_unit_det(rng), c = random_unit_det(rng);
        double d1 = hyp_distance(a, b);
        CHECK(d1 >= 0);
        CHECK(d1 == doctest::Approx(hyp_distance(b, a)).epsilon(1e-9));
        CHECK(hyp_distance(c.mul(a), c.mul(b)) == doctest::Approx(d1).epsilon(1e-9));
    }
    Mat2d bad{2, 0, 0, 2};
    CHECK_THROWS_WITH_AS(hyp_distance(bad, bad), "non-unit determinant", Error);
}

TEST_CASE("law-of-sines bound") {
    CHECK(law_of_sines_bound(0.1, 1.0) ==
          doctest::Approx(std::sinh(0.2) / std::sinh(2.0)).epsilon(1e-12));
    CHECK(law_of_sines_bound(0.1, 1.0) == doctest::Approx(0.055516).epsilon(2e-4));
    CHECK(law_of_sines_bound(0.0, 2.0) == 0.0);
    CHECK(law_of_sines_bound(0.1, 2.0) ==
          doctest::Approx(std::sinh(0.2) / std::sinh(4.0)).epsilon(1e-12));
    CHECK(law_of_sines_bound(5.0, 0.01) == 1.0);  // clamped
    CHECK_THROWS_AS(law_of_sines_bound(0.1, 0.0), Error);
}

TEST_CASE("recurrence profile over a cyclic group") {
    Mat2d g = Mat2d::geodesic(std::log(2.0));  // diag(1/2, 2)
    double l2 = std::log(2.0);
    auto prof = recurrence_profile({g}, {l2, 3 * l2, 0.5 * l2}, 4);
    CHECK(prof[0].epsilon == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(prof[0].best_word == std::vector<int>{1});
    CHECK(prof[1].epsilon == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(prof[1].best_word.size() == 3);
    CHECK(prof[2].epsilon == doctest::Approx(0.5 * l2).epsilon(1e-9));

    auto empty = recurrence_profile({}, {1.7}, 3);
    CHECK(empty[0].epsilon == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(empty[0].best_word.empty());
}

TEST_CASE("recurrence epsilon nonincreasing in word bound") {
    Mat2d g = Mat2d::geodesic(std::log(2.0));
    Mat2d h = Mat2d::shear_h(1.0);
    std::vector<double> ts = {0.4, 0.9, 1.7};
    double prev[3] = {1e9, 1e9, 1e9};
    for (int wb = 0; wb <= 5; ++wb) {
        auto prof = recurrence_profile({g, h}, ts, wb);
        for (int i = 0; i < 3; ++i) {
            CHECK(prof[i].epsilon <= prev[i] + 1e-12);
            prev[i] = prof[i].epsilon;
        }
    }
}

TEST_CASE("periodicity search") {
    Mat2d g = Mat2d::geodesic(std::log(2.0));
    auto s = is_periodic({g}, 3);
    REQUIRE(s.has_value());
    CHECK(*s == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CHECK_FALSE(is_periodic({Mat2d::shear_h(1.0)}, 6).has_value());
    CHECK_FALSE(is_periodic({}, 3).has_value());

    // exact kind
    Mat2q gq(QuadNum(Rational(BigInt(1), BigInt(2))), QuadNum(0), QuadNum(0), QuadNum(2));
    auto se = is_periodic_exact({gq}, 3);
    REQUIRE(se.has_value());
    CHECK(*se == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    Mat2q hq(QuadNum(1), QuadNum(1), QuadNum(0), QuadNum(1));
    CHECK_FALSE(is_periodic_exact({hq}, 6).has_value());
}

TEST_CASE("identity certificate on the torus") {
    TranslationSurface t = make_square_torus();
    AutomorphismCertificate cert;
    cert.matrix = Mat2q();  // identity
    CertPiece pc;
    pc.src_poly = 0;
    pc.verts = t.polygon(0);
    pc.shift = {QuadNum(0), QuadNum(0)};
    pc.dst_poly = 0;
    cert.pieces = {pc};
    CHECK(verify_affine_automorphism(t, cert).pass());
}

TEST_CASE("torus shear certificate verifies exactly") {
    TranslationSurface t = make_square_torus();
    auto cert = torus_shear_certificate();
    auto rep = verify_affine_automorphism(t, cert);
    for (const auto& f : rep.failures) MESSAGE(f);
    CHECK(rep.pass());
    CHECK(rep.truncated.empty());
}

TEST_CASE("scaling matrix fails with not area-preserving") {
    TranslationSurface t = make_square_torus();
    AutomorphismCertificate cert;
    cert.matrix = Mat2q(QuadNum(2), QuadNum(0), QuadNum(0), QuadNum(2));
    auto rep = verify_affine_automorphism(t, cert);
    REQUIRE_FALSE(rep.pass());
    CHECK(rep.failures[0] == "not area-preserving");
}

TEST_CASE("tampered certificates fail") {
    TranslationSurface t = make_square_torus();
    QuadNum eps{Rational(BigInt(1), BigInt(1000000000))};

    auto moved = torus_shear_certificate();
    moved.pieces[1].verts[1].x += eps;  // dent one piece by 1e-9
    CHECK_FALSE(verify_affine_automorphism(t, moved).pass());

    auto shifted = torus_shear_certificate();
    shifted.pieces[1].shift.x += eps;  // image slides off by 1e-9
    CHECK_FALSE(verify_affine_automorphism(t, shifted).pass());

    auto wrong_cut = torus_shear_certificate();
    wrong_cut.pieces[0].verts[2].y -= eps;
    CHECK_FALSE(verify_affine_automorphism(t, wrong_cut).pass());
}

TEST_CASE("generated torus shear certificate") {
    TranslationSurface t = make_square_torus();
    Mat2q shear(QuadNum(1), QuadNum(1), QuadNum(0), QuadNum(1));
    auto cert = generate_certificate(t, shear);
    CHECK(verify_affine_automorphism(t, cert).pass());
    CHECK(cert.pieces.size() >= 2);
}

TEST_CASE("octagon parabolic from the cylinder moduli") {
    TranslationSurface oct = make_regular_octagon();
    // the two horizontal cylinders have moduli m and m/2; the smallest common
    // multiplier is 1/m_small = 2 + 2 sqrt 2
    auto dec = cylinder_decomposition(oct, Vec2q{QuadNum(1), QuadNum(0)}, 10.0);
    REQUIRE(dec.cylinders.size() == 2);
    double shear_param = 0;
    for (const auto& cyl : dec.cylinders)
        shear_param = std::max(shear_param, cyl.waist / cyl.height);
    CHECK(shear_param == doctest::Approx(2 + 2 * std::sqrt(2.0)).epsilon(1e-12));

    QuadNum c(Rational(2), Rational(2), 2);  // 2 + 2 sqrt 2, exact
    Mat2q parabolic(QuadNum(1), c, QuadNum(0), QuadNum(1));
    auto cert = generate_certificate(oct, parabolic);
    auto rep = verify_affine_automorphism(oct, cert);
    for (const auto& f : rep.failures) MESSAGE(f);
    CHECK(rep.pass());
    CHECK(rep.truncated.empty());

    // tampering any piece must break it
    auto bad = cert;
    bad.pieces[0].verts[0].x += QuadNum(Rational(BigInt(1), BigInt(1000000000)));
    CHECK_FALSE(verify_affine_automorphism(oct, bad).pass());
}

TEST_CASE("certificate file round-trip") {
    TranslationSurface t = make_square_torus();
    auto cert = torus_shear_certificate();
    std::string text = write_certificate(cert, t);
    auto back = parse_certificate(text, t);
    CHECK(back.pieces.size() == cert.pieces.size());
    CHECK(verify_affine_automorphism(t, back).pass());
    CHECK(write_certificate(back, t) == text);
}

TEST_CASE("recurrence csv") {
    auto prof = recurrence_profile({Mat2d::geodesic(std::log(2.0))}, {0.3}, 2);
    std::string csv = recurrence_to_csv(prof);
    CHECK(csv.rfind("t,epsilon,word\n", 0) == 0);
}

}  // TEST_SUITE
