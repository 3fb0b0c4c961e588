#include "mathforge/rational.hpp"

namespace mathforge::lang {

using boost::multiprecision::gcd;

Rational::Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_ == 0) throw ValueError("division by zero");
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
    BigInt g = gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return Rational(num_ * o.num_, den_ * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw ValueError("division by zero");
    return Rational(num_ * o.den_, den_ * o.num_);
}

bool Rational::operator<(const Rational& o) const {
    return num_ * o.den_ < o.num_ * den_;
}

BigInt Rational::floor() const {
    if (den_ == 1) return num_;
    BigInt q = num_ / den_;
    if (num_ < 0) q -= 1;  // cpp_int division truncates toward zero
    return q;
}

Rational Rational::pow(std::int64_t e) const {
    if (e == 0) return Rational(1);
    bool invert = e < 0;
    std::uint64_t n = invert ? std::uint64_t(-(e + 1)) + 1 : std::uint64_t(e);
    if (invert && num_ == 0) throw ValueError("zero raised to a negative power");
    Rational base = *this;
    Rational acc(1);
    while (n > 0) {
        if (n & 1) acc = acc * base;
        base = base * base;
        n >>= 1;
        if (n > 0) {
            // squaring outpaces the per-op guard; bail before huge allocations
            if (base.digit_size() > 1u << 16) throw ValueError("number too large");
        }
    }
    return invert ? Rational(1) / acc : acc;
}

std::string Rational::str() const {
    std::string s = num_.str();
    if (den_ != 1) {
        s += "/";
        s += den_.str();
    }
    return s;
}

std::optional<Rational> Rational::parse(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '-') {
        neg = true;
        ++i;
    }
    auto read_int = [&](BigInt& out) -> bool {
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return false;
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        out = BigInt(text.substr(start, i - start));
        return true;
    };
    BigInt p, q = 1;
    if (!read_int(p)) return std::nullopt;
    if (i < text.size() && text[i] == '/') {
        ++i;
        if (!read_int(q) || q == 0) return std::nullopt;
    }
    if (i != text.size()) return std::nullopt;
    return Rational(neg ? -p : p, q);
}

std::size_t Rational::digit_size() const {
    return num_.str().size() + den_.str().size();
}

Rational rational_gcd(const Rational& a, const Rational& b) {
    if (a.is_zero()) return b.abs();
    if (b.is_zero()) return a.abs();
    BigInt gn = gcd(boost::multiprecision::abs(a.num()), boost::multiprecision::abs(b.num()));
    BigInt gd = gcd(a.den(), b.den());
    return Rational(gn, a.den() / gd * b.den());
}

Rational rational_lcm(const Rational& a, const Rational& b) {
    if (a.is_zero() || b.is_zero()) return Rational(0);
    BigInt an = boost::multiprecision::abs(a.num());
    BigInt bn = boost::multiprecision::abs(b.num());
    BigInt gn = gcd(an, bn);
    return Rational(an / gn * bn, gcd(a.den(), b.den()));
}

} // namespace mathforge::lang
