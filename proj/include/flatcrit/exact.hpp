#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flatcrit {

using BigInt = boost::multiprecision::cpp_int;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Arbitrary-precision rational, always normalized: den > 0, gcd(|num|, den) = 1.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(BigInt n) : num_(std::move(n)), den_(1) {}
    Rational(BigInt n, BigInt d);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    int sign() const { return num_ == 0 ? 0 : (num_ > 0 ? 1 : -1); }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    /// Nearest IEEE-754 binary64 value, ties to even. Throws on overflow.
    double to_double() const;

    /// Exact value of a finite double (every finite double is a dyadic rational).
    static Rational from_double(double x);

    std::string str() const;
    static std::optional<Rational> parse(std::string_view text);

private:
    BigInt num_, den_;
    void normalize();
};

/// Element of the real quadratic field Q(sqrt(D)): value a + b*sqrt(D).
/// D is 0 (plain rational, b forced to 0) or a square-free integer >= 2.
/// Operands with D = 0 lift implicitly into the other operand's field;
/// two distinct nonzero discriminants never mix.
class QuadNum {
public:
    QuadNum() : d_(0) {}
    QuadNum(long long n) : a_(n), d_(0) {}
    QuadNum(Rational a) : a_(std::move(a)), d_(0) {}
    QuadNum(Rational a, Rational b, std::int64_t d);

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    std::int64_t d() const { return d_; }

    bool is_rational() const { return b_.is_zero(); }
    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }

    /// Exact sign, decided by rational comparisons only.
    int sign() const;

    QuadNum operator-() const;
    QuadNum& operator+=(const QuadNum& o);
    QuadNum& operator-=(const QuadNum& o);
    QuadNum& operator*=(const QuadNum& o);
    QuadNum& operator/=(const QuadNum& o);

    friend QuadNum operator+(QuadNum a, const QuadNum& b) { return a += b; }
    friend QuadNum operator-(QuadNum a, const QuadNum& b) { return a -= b; }
    friend QuadNum operator*(QuadNum a, const QuadNum& b) { return a *= b; }
    friend QuadNum operator/(QuadNum a, const QuadNum& b) { return a /= b; }

    friend bool operator==(const QuadNum& x, const QuadNum& y) {
        return (x - y).is_zero();
    }
    friend bool operator!=(const QuadNum& x, const QuadNum& y) { return !(x == y); }
    friend bool operator<(const QuadNum& x, const QuadNum& y) { return (x - y).sign() < 0; }
    friend bool operator>(const QuadNum& x, const QuadNum& y) { return y < x; }
    friend bool operator<=(const QuadNum& x, const QuadNum& y) { return !(y < x); }
    friend bool operator>=(const QuadNum& x, const QuadNum& y) { return !(x < y); }

    QuadNum abs() const { return sign() < 0 ? -*this : *this; }
    QuadNum conj() const;

    /// binary64 approximation within 2 ulp of the exact value (round to nearest,
    /// the a + b*sqrt(D) sum is resolved at adaptive integer precision before the
    /// final rounding). Throws "magnitude overflow" if out of double range.
    double to_double() const;

    std::string str() const;

    /// Accepts "p/q", "p/q + r/s*sqrt(D)", "p/q - r/s*sqrt(D)", "r/s*sqrt(D)",
    /// "sqrt(D)"; whitespace-insensitive; integer forms without "/q" allowed.
    static std::optional<QuadNum> parse(std::string_view text);

    static bool is_valid_discriminant(std::int64_t d);

private:
    Rational a_, b_;
    std::int64_t d_;
    static std::int64_t join_field(const QuadNum& x, const QuadNum& y);
};

enum class ArithOp { Add, Sub, Mul, Div };

QuadNum qn_arith(const QuadNum& x, const QuadNum& y, ArithOp op);
inline int qn_sign(const QuadNum& x) { return x.sign(); }
inline double qn_to_real(const QuadNum& x) { return x.to_double(); }

}  // namespace flatcrit
