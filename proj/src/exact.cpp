#include "flatcrit/exact.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <vector>

namespace flatcrit {

namespace mp = boost::multiprecision;

Rational::Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_ == 0) throw Error("zero divisor");
    normalize();
}

void Rational::normalize() {
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    if (num_ == 0) {
        den_ = 1;
        return;
    }
    BigInt g = mp::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational& Rational::operator+=(const Rational& o) {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
}

Rational& Rational::operator-=(const Rational& o) {
    num_ = num_ * o.den_ - o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
}

Rational& Rational::operator*=(const Rational& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw Error("zero divisor");
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
}

double Rational::to_double() const {
    if (num_ == 0) return 0.0;
    bool neg = num_ < 0;
    BigInt n = neg ? BigInt(-num_) : num_;
    const BigInt& d = den_;

    // Scale so that floor(n * 2^k / d) carries 54 significant bits, round the
    // 54-bit quotient to 53 bits with ties to even, then apply the exponent.
    long k = 54 + static_cast<long>(mp::msb(d)) - static_cast<long>(mp::msb(n));
    BigInt q, r;
    for (;;) {
        BigInt scaled = k >= 0 ? BigInt(n << k) : BigInt(n >> -k);
        mp::divide_qr(scaled, d, q, r);
        long bits = static_cast<long>(mp::msb(q)) + 1;
        if (bits == 54) break;
        k += 54 - bits;
    }
    bool sticky = r != 0 || k < 0;  // k < 0 only after a right shift dropped bits
    bool low = mp::bit_test(q, 0);
    q >>= 1;
    if (low && (sticky || mp::bit_test(q, 0))) {
        ++q;
        if (mp::msb(q) == 53) {  // carry out of the 53-bit mantissa
            q >>= 1;
            k -= 1;
        }
    }
    double mant = static_cast<double>(static_cast<std::uint64_t>(q));
    int exp2 = static_cast<int>(-(k - 1));
    if (exp2 > 971) throw Error("magnitude overflow");
    double v = std::ldexp(mant, exp2);
    if (!std::isfinite(v)) throw Error("magnitude overflow");
    return neg ? -v : v;
}

Rational Rational::from_double(double x) {
    if (!std::isfinite(x)) throw Error("non-finite value");
    if (x == 0.0) return Rational();
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
    auto mi = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    BigInt num(mi);
    if (exp >= 0) return Rational(num << exp);
    return Rational(std::move(num), BigInt(1) << -exp);
}

std::string Rational::str() const {
    std::string s = num_.str();
    if (den_ != 1) s += "/" + den_.str();
    return s;
}

namespace {

std::string strip_ws(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

bool parse_int(std::string_view s, BigInt& out) {
    if (s.empty()) return false;
    size_t i = 0;
    if (s[0] == '+' || s[0] == '-') i = 1;
    if (i == s.size()) return false;
    for (size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
    out = BigInt(std::string(s));
    return true;
}

bool parse_rat(std::string_view s, Rational& out) {
    auto slash = s.find('/');
    BigInt n, d;
    if (slash == std::string_view::npos) {
        if (!parse_int(s, n)) return false;
        out = Rational(std::move(n));
        return true;
    }
    if (!parse_int(s.substr(0, slash), n)) return false;
    if (!parse_int(s.substr(slash + 1), d)) return false;
    if (d == 0) return false;
    out = Rational(std::move(n), std::move(d));
    return true;
}

}  // namespace

std::optional<Rational> Rational::parse(std::string_view text) {
    Rational r;
    if (!parse_rat(strip_ws(text), r)) return std::nullopt;
    return r;
}

bool QuadNum::is_valid_discriminant(std::int64_t d) {
    if (d == 0) return true;
    if (d < 2) return false;
    for (std::int64_t p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

QuadNum::QuadNum(Rational a, Rational b, std::int64_t d)
    : a_(std::move(a)), b_(std::move(b)), d_(d) {
    if (!is_valid_discriminant(d_))
        throw Error("invalid field discriminant " + std::to_string(d_));
    if (d_ == 0 && !b_.is_zero()) throw Error("field mismatch: sqrt coefficient with D = 0");
    if (b_.is_zero()) d_ = d;  // keep declared field even for rational values
}

std::int64_t QuadNum::join_field(const QuadNum& x, const QuadNum& y) {
    if (x.d_ == y.d_) return x.d_;
    if (x.d_ == 0 && x.b_.is_zero()) return y.d_;
    if (y.d_ == 0 && y.b_.is_zero()) return x.d_;
    throw Error("field mismatch");
}

int QuadNum::sign() const {
    int sa = a_.sign();
    int sb = b_.sign();
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: a + b*sqrt(D) vs 0 reduces to a^2 vs b^2 D.
    Rational lhs = a_ * a_;
    Rational rhs = b_ * b_ * Rational(BigInt(d_));
    if (lhs == rhs) return 0;  // unreachable for square-free D >= 2
    bool a_dominates = lhs > rhs;
    return a_dominates ? sa : sb;
}

QuadNum QuadNum::operator-() const {
    QuadNum r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
}

QuadNum& QuadNum::operator+=(const QuadNum& o) {
    d_ = join_field(*this, o);
    a_ += o.a_;
    b_ += o.b_;
    return *this;
}

QuadNum& QuadNum::operator-=(const QuadNum& o) {
    d_ = join_field(*this, o);
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
}

QuadNum& QuadNum::operator*=(const QuadNum& o) {
    d_ = join_field(*this, o);
    Rational dd{BigInt(d_)};
    Rational na = a_ * o.a_ + b_ * o.b_ * dd;
    Rational nb = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(na);
    b_ = std::move(nb);
    return *this;
}

QuadNum& QuadNum::operator/=(const QuadNum& o) {
    d_ = join_field(*this, o);
    if (o.is_zero()) throw Error("zero divisor");
    // Multiply by the conjugate; the field norm a^2 - b^2 D vanishes only at 0.
    Rational dd{BigInt(d_)};
    Rational norm = o.a_ * o.a_ - o.b_ * o.b_ * dd;
    Rational na = (a_ * o.a_ - b_ * o.b_ * dd) / norm;
    Rational nb = (b_ * o.a_ - a_ * o.b_) / norm;
    a_ = std::move(na);
    b_ = std::move(nb);
    return *this;
}

QuadNum QuadNum::conj() const {
    QuadNum r = *this;
    r.b_ = -r.b_;
    return r;
}

double QuadNum::to_double() const {
    if (b_.is_zero()) return a_.to_double();
    // Resolve a + b*sqrt(D) as an exact rational at precision P, raising P until
    // the approximation error |b| * 2^-P is far below one ulp of the result.
    for (unsigned prec = 96; prec <= 6144; prec *= 2) {
        BigInt s = mp::sqrt(BigInt(d_) << (2 * prec));  // floor(sqrt(D) * 2^P)
        Rational approx = a_ + b_ * Rational(s, BigInt(1) << prec);
        Rational err = b_.abs() * Rational(BigInt(1), BigInt(1) << (prec - 64));
        if (approx.abs() > err) return approx.to_double();
        if (approx.is_zero() && is_zero()) return 0.0;
    }
    throw Error("conversion precision exhausted (value too close to zero)");
}

std::string QuadNum::str() const {
    if (b_.is_zero()) return a_.str();
    std::string s;
    if (!a_.is_zero()) s = a_.str() + (b_.sign() < 0 ? " - " : " + ");
    else if (b_.sign() < 0) s = "-";
    Rational babs = b_.abs();
    if (!(babs.num() == 1 && babs.den() == 1)) s += babs.str() + "*";
    s += "sqrt(" + std::to_string(d_) + ")";
    return s;
}

std::optional<QuadNum> QuadNum::parse(std::string_view text) {
    std::string s = strip_ws(text);
    if (s.empty()) return std::nullopt;

    // Split into at most two signed terms at a top-level '+'/'-'.
    std::vector<std::string> terms;
    size_t start = 0;
    for (size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != '/' && s[i - 1] != '+' &&
            s[i - 1] != '-' && s[i - 1] != '(') {
            terms.push_back(s.substr(start, i - start));
            start = i;
        }
    }
    terms.push_back(s.substr(start));
    if (terms.size() > 2) return std::nullopt;

    Rational a, b;
    std::int64_t d = 0;
    for (auto& term : terms) {
        bool neg = false;
        std::string_view t = term;
        if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
            neg = t[0] == '-';
            t.remove_prefix(1);
        }
        auto sq = t.find("sqrt(");
        if (sq == std::string_view::npos) {
            Rational r;
            if (!parse_rat(t, r)) return std::nullopt;
            a += neg ? -r : r;
            continue;
        }
        if (t.back() != ')') return std::nullopt;
        std::string_view inside = t.substr(sq + 5, t.size() - sq - 6);
        BigInt dv;
        if (!parse_int(inside, dv) || dv < 0 ||
            dv > BigInt(std::numeric_limits<std::int64_t>::max()))
            return std::nullopt;
        std::int64_t dterm = static_cast<std::int64_t>(dv);
        Rational coeff(1);
        if (sq > 0) {
            if (t[sq - 1] != '*') return std::nullopt;
            if (!parse_rat(t.substr(0, sq - 1), coeff)) return std::nullopt;
        }
        if (dterm == 0) continue;  // sqrt(0) contributes nothing
        if (dterm == 1) {
            a += neg ? -coeff : coeff;  // sqrt(1) folds into the rational part
            continue;
        }
        if (!is_valid_discriminant(dterm)) return std::nullopt;
        if (d != 0 && d != dterm) return std::nullopt;
        d = dterm;
        b += neg ? -coeff : coeff;
    }
    if (b.is_zero()) d = 0;
    try {
        return QuadNum(std::move(a), std::move(b), d);
    } catch (const Error&) {
        return std::nullopt;
    }
}

QuadNum qn_arith(const QuadNum& x, const QuadNum& y, ArithOp op) {
    switch (op) {
        case ArithOp::Add: return x + y;
        case ArithOp::Sub: return x - y;
        case ArithOp::Mul: return x * y;
        case ArithOp::Div: return x / y;
    }
    throw Error("unknown op");
}

}  // namespace flatcrit
