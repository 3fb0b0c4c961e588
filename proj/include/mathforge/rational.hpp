#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mathforge::lang {

using BigInt = boost::multiprecision::cpp_int;

// Arbitrary-precision rational, always in lowest terms with positive
// denominator. Division by zero and oversized operands throw ValueError,
// which the interpreter maps to RuntimeError status.
struct ValueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(int n) : num_(n), den_(1) {}                 // NOLINT: implicit by design
    Rational(std::int64_t n) : num_(n), den_(1) {}        // NOLINT
    Rational(BigInt n) : num_(std::move(n)), den_(1) {}   // NOLINT
    Rational(BigInt n, BigInt d);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    bool is_negative() const { return num_ < 0; }
    int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

    Rational operator-() const;
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;  // throws ValueError on /0
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    Rational abs() const { return is_negative() ? -*this : *this; }
    BigInt floor() const;  // largest integer <= value
    Rational pow(std::int64_t e) const;  // throws on 0^negative

    // "p/q" or "n" for integers; locale-independent.
    std::string str() const;

    // Parses "p", "-p", "p/q", "-p/q". Returns nullopt on anything else.
    static std::optional<Rational> parse(const std::string& text);

    // Total decimal digits across numerator and denominator; resource guard.
    std::size_t digit_size() const;

private:
    void normalize();

    BigInt num_;
    BigInt den_;
};

// gcd/lcm extended to rationals: gcd(a/b, c/d) = gcd(a,c)/lcm(b,d) and dual.
Rational rational_gcd(const Rational& a, const Rational& b);
Rational rational_lcm(const Rational& a, const Rational& b);

} // namespace mathforge::lang
