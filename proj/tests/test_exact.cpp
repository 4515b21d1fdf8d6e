#include <doctest.h>

#include "flatcrit/exact.hpp"

#include <cmath>
#include <random>

using namespace flatcrit;

namespace {

QuadNum qn(long long a_num, long long a_den, long long b_num, long long b_den, std::int64_t d) {
    return QuadNum(Rational(BigInt(a_num), BigInt(a_den)), Rational(BigInt(b_num), BigInt(b_den)),
                   d);
}

QuadNum random_qn(std::mt19937_64& rng, std::int64_t d) {
    std::uniform_int_distribution<long long> num(-40, 40);
    std::uniform_int_distribution<long long> den(1, 12);
    return qn(num(rng), den(rng), num(rng), den(rng), d);
}

}  // namespace

TEST_SUITE("exact") {

TEST_CASE("rational normalization and arithmetic") {
    Rational r(BigInt(6), BigInt(-8));
    CHECK(r.num() == BigInt(-3));
    CHECK(r.den() == BigInt(4));
    CHECK(Rational(BigInt(3), BigInt(4)) + Rational(BigInt(1), BigInt(4)) == Rational(1));
    CHECK_THROWS_WITH_AS(Rational(1) / Rational(0), "zero divisor", Error);
}

TEST_CASE("qn_arith spec examples") {
    QuadNum one_plus = qn(1, 1, 1, 1, 2);    // 1 + sqrt(2)
    QuadNum one_minus = qn(1, 1, -1, 1, 2);  // 1 - sqrt(2)
    CHECK(qn_arith(one_plus, one_minus, ArithOp::Mul) == QuadNum(-1));
    CHECK(qn_arith(QuadNum(Rational(BigInt(3), BigInt(4))),
                   QuadNum(Rational(BigInt(1), BigInt(4))), ArithOp::Add) == QuadNum(1));
    CHECK(qn_arith(one_plus, one_plus, ArithOp::Div) == QuadNum(1));
    CHECK_THROWS_WITH_AS(qn_arith(one_plus, qn(1, 1, 1, 1, 3), ArithOp::Add), "field mismatch",
                         Error);
    CHECK_THROWS_WITH_AS(qn_arith(one_plus, qn(0, 1, 0, 1, 2), ArithOp::Div), "zero divisor",
                         Error);
}

TEST_CASE("qn_sign spec examples") {
    // 1 + sqrt(2) - 5/2 = -3/2 + sqrt(2) < 0 because (3/2)^2 = 9/4 > 2
    CHECK(qn_sign(qn(-3, 2, 1, 1, 2)) == -1);
    CHECK(qn_sign(qn(0, 1, 0, 1, 2)) == 0);
    CHECK(qn_sign(qn(-1, 1, 1, 1, 2)) == 1);  // sqrt(2) > 1
    CHECK(qn_sign(qn(3, 2, -1, 1, 2)) == 1);
    CHECK(qn_sign(qn(1, 1, -1, 1, 2)) == -1);
}

TEST_CASE("qn_to_real spec examples") {
    CHECK(qn_to_real(QuadNum(Rational(BigInt(3), BigInt(4)))) == 0.75);
    // high-precision oracle: sqrt(2) = 1.41421356237309504880...
    CHECK(qn_to_real(qn(1, 1, 1, 1, 2)) == doctest::Approx(2.414213562373095).epsilon(1e-15));
    CHECK(qn_to_real(QuadNum(0)) == 0.0);
}

TEST_CASE("to_double is correctly rounded on dyadics and simple fractions") {
    CHECK(Rational(BigInt(1), BigInt(3)).to_double() == 1.0 / 3.0);
    CHECK(Rational(BigInt(-7), BigInt(10)).to_double() == -0.7);
    CHECK(Rational(BigInt(1), BigInt(1) << 70).to_double() == std::ldexp(1.0, -70));
    // round-trip: every double is exactly representable
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1e9, 1e9);
    for (int i = 0; i < 200; ++i) {
        double x = dist(rng);
        CHECK(Rational::from_double(x).to_double() == x);
    }
    Rational huge(BigInt(1) << 1100);
    CHECK_THROWS_WITH_AS(huge.to_double(), "magnitude overflow", Error);
}

TEST_CASE("field axioms on random triples") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
        QuadNum x = random_qn(rng, 2), y = random_qn(rng, 2), z = random_qn(rng, 2);
        CHECK((x + y) + z == x + (y + z));
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        if (!y.is_zero()) CHECK((x / y) * y == x);
        if (!x.is_zero()) CHECK(x * (QuadNum(1) / x) == QuadNum(1));
    }
}

TEST_CASE("sign agrees with floating value away from zero") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 300; ++i) {
        QuadNum x = random_qn(rng, 5);
        double v = qn_to_real(x);
        if (std::abs(v) > 1e-12) CHECK(qn_sign(x) == (v > 0 ? 1 : -1));
    }
}

TEST_CASE("parsing and formatting round-trip") {
    auto p1 = QuadNum::parse("1/2 + 3/4*sqrt(2)");
    REQUIRE(p1.has_value());
    CHECK(p1->a() == Rational(BigInt(1), BigInt(2)));
    CHECK(p1->b() == Rational(BigInt(3), BigInt(4)));
    CHECK(p1->d() == 2);

    auto p2 = QuadNum::parse("  -5/3 ");
    REQUIRE(p2.has_value());
    CHECK(p2->is_rational());

    auto p3 = QuadNum::parse("1 - sqrt(2)");
    REQUIRE(p3.has_value());
    CHECK(qn_sign(*p3) == -1);

    auto p4 = QuadNum::parse("sqrt(5)");
    REQUIRE(p4.has_value());
    CHECK(p4->d() == 5);

    CHECK_FALSE(QuadNum::parse("sqrt(4)").has_value());   // not square-free
    CHECK_FALSE(QuadNum::parse("1 + x").has_value());

    for (const char* text : {"0", "-7/9", "1/2 + 1/2*sqrt(2)", "3 - 11/7*sqrt(5)", "sqrt(3)"}) {
        auto q = QuadNum::parse(text);
        REQUIRE(q.has_value());
        auto back = QuadNum::parse(q->str());
        REQUIRE(back.has_value());
        CHECK(*back == *q);
    }
}

TEST_CASE("division never loses exactness") {
    std::mt19937_64 rng(44);
    for (int i = 0; i < 100; ++i) {
        QuadNum x = random_qn(rng, 3), y = random_qn(rng, 3);
        if (y.is_zero()) continue;
        CHECK((x / y) * y == x);
    }
}

TEST_CASE("conversion survives heavy cancellation") {
    // 169/239 approximates sqrt(1/2) well: force a + b*sqrt(2) near zero.
    QuadNum tiny = qn(-239, 169, 1, 1, 2) * QuadNum(Rational(BigInt(169), BigInt(1)));
    // tiny = 169*sqrt(2) - 239, about 0.00059
    double v = qn_to_real(tiny);
    CHECK(v == doctest::Approx(169.0 * std::sqrt(2.0) - 239.0).epsilon(1e-12));
    CHECK(qn_sign(tiny) == (v > 0 ? 1 : -1));
}

}  // TEST_SUITE
