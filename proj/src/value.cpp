#include "mathforge/value.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace mathforge::lang {
namespace {

BigInt pow10(int e) {
    BigInt r = 1;
    for (int i = 0; i < e; ++i) r *= 10;
    return r;
}

int digits10(const BigInt& n) {
    if (n == 0) return 1;
    std::string s = BigInt(boost::multiprecision::abs(n)).str();
    return static_cast<int>(s.size());
}

BigInt isqrt(const BigInt& n) { return boost::multiprecision::sqrt(n); }

} // namespace

// ---------------------------------------------------------------- Decimal

Rational Decimal::to_rational() const {
    if (exponent >= 0) return Rational(mantissa * pow10(exponent));
    return Rational(mantissa, pow10(-exponent));
}

Decimal Decimal::from_rational(const Rational& r) {
    if (r.is_zero()) return Decimal{0, 0};
    const bool neg = r.is_negative();
    const BigInt p = boost::multiprecision::abs(r.num());
    const BigInt q = r.den();
    const int L = kSignificantDigits;

    // Initial estimate of the adjusted exponent, corrected exactly below.
    int aexp = digits10(p) - digits10(q);
    for (int attempt = 0; attempt < 4; ++attempt) {
        const int shift = (L - 1) - aexp;
        BigInt num = p;
        BigInt den = q;
        if (shift >= 0) num *= pow10(shift); else den *= pow10(-shift);
        BigInt m = num / den;
        const BigInt rem = num % den;
        // Round half to even.
        const BigInt twice = rem * 2;
        if (twice > den || (twice == den && (m % 2) != 0)) m += 1;

        const BigInt lo = pow10(L - 1);
        const BigInt hi = pow10(L);
        if (m >= hi) { aexp += 1; continue; }
        if (m < lo) { aexp -= 1; continue; }

        int e = aexp - (L - 1);
        while (m % 10 == 0) { m /= 10; ++e; }
        return Decimal{neg ? -m : m, e};
    }
    throw ValueError("decimal rounding failed to converge");
}

std::string Decimal::str() const {
    if (mantissa == 0) return "0";
    const bool neg = mantissa < 0;
    const std::string digits = BigInt(boost::multiprecision::abs(mantissa)).str();
    const int n = static_cast<int>(digits.size());
    const int aexp = exponent + n - 1;

    std::string body;
    if (aexp >= -6 && aexp <= 20) {
        if (exponent >= 0) {
            body = digits + std::string(static_cast<std::size_t>(exponent), '0');
        } else {
            const int point = n + exponent;  // digits left of the decimal point
            if (point > 0) {
                body = digits.substr(0, point) + "." + digits.substr(point);
            } else {
                body = "0." + std::string(static_cast<std::size_t>(-point), '0') + digits;
            }
        }
    } else {
        body = digits.substr(0, 1);
        if (n > 1) body += "." + digits.substr(1);
        body += "e";
        body += (aexp < 0 ? "-" : "+");
        body += std::to_string(std::abs(aexp));
    }
    return neg ? "-" + body : body;
}

// ------------------------------------------------------------------ Surd

Rational Surd::approx(int digits) const {
    const BigInt scale = pow10(digits);
    const BigInt root = isqrt(radicand * scale * scale);
    return rational_part + coeff * Rational(root, scale);
}

std::string Surd::str() const {
    const std::string root = "sqrt(" + radicand.str() + ")";
    std::string tail;
    if (coeff == Rational(1)) tail = root;
    else if (coeff == Rational(-1)) tail = "-" + root;
    else tail = coeff.str() + "*" + root;

    if (rational_part.is_zero()) return tail;

    std::string head = rational_part.str();
    if (coeff.is_negative()) {
        Rational mag = coeff.abs();
        std::string t = (mag == Rational(1)) ? root : mag.str() + "*" + root;
        return head + " - " + t;
    }
    return head + " + " + tail;
}

// ------------------------------------------------------------ Polynomial

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Polynomial Polynomial::constant(Rational c) {
    Polynomial p;
    p.add_term({}, c);
    return p;
}

Polynomial Polynomial::variable(const std::string& name) {
    Polynomial p;
    p.add_term({{name, 1}}, Rational(1));
    return p;
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Polynomial::constant_value() const {
    if (terms_.empty()) return Rational(0);
    return terms_.begin()->second;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial r;
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : o.terms_) {
            // Merge the two sorted exponent lists.
            Monomial m;
            auto ia = ma.begin();
            auto ib = mb.begin();
            while (ia != ma.end() || ib != mb.end()) {
                if (ib == mb.end() || (ia != ma.end() && ia->first < ib->first)) m.push_back(*ia++);
                else if (ia == ma.end() || ib->first < ia->first) m.push_back(*ib++);
                else { m.emplace_back(ia->first, ia->second + ib->second); ++ia; ++ib; }
            }
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial result = Polynomial::constant(Rational(1));
    Polynomial base = *this;
    while (e > 0) {
        if (e & 1u) result = result * base;
        base = (e >>= 1u) ? base * base : base;
    }
    return result;
}

Polynomial Polynomial::substitute(const std::string& var, const Polynomial& value) const {
    Polynomial r;
    for (const auto& [m, c] : terms_) {
        Monomial rest;
        int e = 0;
        for (const auto& [v, k] : m) {
            if (v == var) e = k; else rest.push_back({v, k});
        }
        Polynomial term;
        term.add_term(rest, c);
        if (e > 0) term = term * value.pow(static_cast<unsigned>(e));
        r = r + term;
    }
    return r;
}

Polynomial Polynomial::derivative(const std::string& var) const {
    Polynomial r;
    for (const auto& [m, c] : terms_) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i].first != var) continue;
            Monomial dm = m;
            const int k = dm[i].second;
            if (k == 1) dm.erase(dm.begin() + static_cast<std::ptrdiff_t>(i));
            else dm[i].second = k - 1;
            r.add_term(dm, c * Rational(k));
        }
    }
    return r;
}

int Polynomial::degree_in(const std::string& var) const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
        (void)c;
        for (const auto& [v, k] : m)
            if (v == var) d = std::max(d, k);
    }
    return d;
}

int Polynomial::total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
        (void)c;
        int t = 0;
        for (const auto& [v, k] : m) { (void)v; t += k; }
        d = std::max(d, t);
    }
    return d;
}

std::set<std::string> Polynomial::variables() const {
    std::set<std::string> vars;
    for (const auto& [m, c] : terms_) {
        (void)c;
        for (const auto& [v, k] : m) { (void)k; vars.insert(v); }
    }
    return vars;
}

Polynomial Polynomial::coefficient_of(const std::string& var, int k) const {
    Polynomial r;
    for (const auto& [m, c] : terms_) {
        Monomial rest;
        int e = 0;
        for (const auto& [v, kk] : m) {
            if (v == var) e = kk; else rest.push_back({v, kk});
        }
        if (e == k) r.add_term(rest, c);
    }
    return r;
}

std::size_t Polynomial::node_count() const {
    std::size_t n = 0;
    for (const auto& [m, c] : terms_) { (void)c; n += 1 + m.size(); }
    return n == 0 ? 1 : n;
}

namespace {

// Graded lexicographic order, descending: higher total degree first, ties
// broken by exponents over the ascending variable list.
bool grlex_before(const Polynomial::Monomial& a, const Polynomial::Monomial& b) {
    int da = 0;
    int db = 0;
    for (const auto& [v, k] : a) { (void)v; da += k; }
    for (const auto& [v, k] : b) { (void)v; db += k; }
    if (da != db) return da > db;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first != ib->first) return ia->first < ib->first;  // earlier var present => bigger
        if (ia->second != ib->second) return ia->second > ib->second;
        ++ia;
        ++ib;
    }
    return ib == b.end() && ia != a.end();
}

std::string monomial_str(const Polynomial::Monomial& m) {
    std::string s;
    for (const auto& [v, k] : m) {
        if (!s.empty()) s += "*";
        s += v;
        if (k > 1) s += "^" + std::to_string(k);
    }
    return s;
}

} // namespace

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<Monomial, Rational>> ordered(terms_.begin(), terms_.end());
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return grlex_before(a.first, b.first); });

    std::string out;
    bool first = true;
    for (const auto& [m, c] : ordered) {
        const Rational mag = c.abs();
        std::string term;
        if (m.empty()) term = mag.str();
        else if (mag == Rational(1)) term = monomial_str(m);
        else term = mag.str() + "*" + monomial_str(m);

        if (first) {
            out = (c.is_negative() ? "-" : "") + term;
            first = false;
        } else {
            out += (c.is_negative() ? " - " : " + ") + term;
        }
    }
    return out;
}

// ------------------------------------------------------------------ Value

std::size_t Value::node_count() const {
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Rational> || std::is_same_v<T, Decimal> ||
                          std::is_same_v<T, bool>) {
                return 1;
            } else if constexpr (std::is_same_v<T, Surd>) {
                return 3;
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                return v.node_count();
            } else if constexpr (std::is_same_v<T, SolutionSet>) {
                std::size_t n = 1;
                for (const auto& alt : v.alternatives)
                    for (const auto& b : alt) n += 1 + b.value.node_count();
                return n;
            } else {
                std::size_t n = 1;
                for (const auto& e : v) n += e.node_count();
                return n;
            }
        },
        data_);
}

std::string canonicalize_value(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Rational>) {
                return x.str();
            } else if constexpr (std::is_same_v<T, Surd>) {
                return x.str();
            } else if constexpr (std::is_same_v<T, Decimal>) {
                return x.str();
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                return x.str();
            } else if constexpr (std::is_same_v<T, SolutionSet>) {
                if (x.alternatives.empty()) return "{}";
                std::vector<std::string> alts;
                alts.reserve(x.alternatives.size());
                for (const auto& alt : x.alternatives) {
                    std::string s = "{";
                    for (std::size_t i = 0; i < alt.size(); ++i) {
                        if (i) s += ", ";
                        s += alt[i].var + ": " + canonicalize_value(alt[i].value);
                    }
                    s += "}";
                    alts.push_back(std::move(s));
                }
                std::sort(alts.begin(), alts.end());
                std::string out = alts[0];
                for (std::size_t i = 1; i < alts.size(); ++i) out += " | " + alts[i];
                return out;
            } else {
                std::string out = "[";
                for (std::size_t i = 0; i < x.size(); ++i) {
                    if (i) out += ", ";
                    out += canonicalize_value(x[i]);
                }
                out += "]";
                return out;
            }
        },
        v.data());
}

// --------------------------------------------------------- constructors

Value make_surd(Rational a, Rational b, BigInt d) {
    if (d < 0) throw ValueError("negative radicand");
    if (b.is_zero() || d == 0) return Value(a);
    if (d == 1) return Value(a + b);
    return Value(Surd{std::move(a), std::move(b), std::move(d)});
}

std::optional<std::pair<BigInt, BigInt>> square_decompose(const BigInt& n) {
    if (n <= 0) throw ValueError("square_decompose expects a positive integer");
    static const BigInt kTrialLimit = 1000000;
    static const BigInt kCertifyLimit = BigInt("1000000000000000000");

    BigInt rem = n;
    BigInt s = 1;
    BigInt d = 1;
    auto strip = [&](const BigInt& p) {
        int e = 0;
        while (rem % p == 0) { rem /= p; ++e; }
        for (int i = 0; i < e / 2; ++i) s *= p;
        if (e % 2) d *= p;
    };
    strip(2);
    for (BigInt i = 3; i <= kTrialLimit && i * i <= rem; i += 2) strip(i);

    if (rem > 1) {
        const BigInt root = isqrt(rem);
        if (root * root == rem) {
            s *= root;
        } else if (rem <= kCertifyLimit) {
            // No factor below 10^6 and not a perfect square: rem is p or p*q,
            // squarefree either way.
            d *= rem;
        } else {
            return std::nullopt;
        }
    }
    return std::make_pair(s, d);
}

// ------------------------------------------------------------ arithmetic

namespace {

[[noreturn]] void bad_operands(const char* op) {
    throw ValueError(std::string("unsupported operands for '") + op + "'");
}

Rational decimal_proxy(const Value& v) {
    if (v.is_rational()) return v.as_rational();
    if (v.is_decimal()) return v.as_decimal().to_rational();
    if (v.is_surd()) return v.as_surd().approx();
    throw ValueError("non-numeric value");
}

Value decimal_result(const Rational& r) { return Value(Decimal::from_rational(r)); }

bool same_radicand(const Value& a, const Value& b) {
    return a.is_surd() && b.is_surd() && a.as_surd().radicand == b.as_surd().radicand;
}

// Split any exact value into (rational part, surd coefficient, radicand);
// plain rationals get coefficient 0.
struct SurdParts {
    Rational a;
    Rational b;
    BigInt d;
};

SurdParts parts_of(const Value& v, const BigInt& d) {
    if (v.is_rational()) return {v.as_rational(), Rational(0), d};
    const Surd& s = v.as_surd();
    return {s.rational_part, s.coeff, s.radicand};
}

} // namespace

Rational numeric_to_rational(const Value& v) { return decimal_proxy(v); }

Value value_add(const Value& a, const Value& b) {
    if (a.is_polynomial() || b.is_polynomial()) {
        if ((a.is_polynomial() || a.is_rational()) && (b.is_polynomial() || b.is_rational())) {
            const Polynomial pa = a.is_polynomial() ? a.as_polynomial() : Polynomial::constant(a.as_rational());
            const Polynomial pb = b.is_polynomial() ? b.as_polynomial() : Polynomial::constant(b.as_rational());
            return Value(pa + pb);
        }
        bad_operands("+");
    }
    if (!a.is_numeric() || !b.is_numeric()) bad_operands("+");
    if (a.is_rational() && b.is_rational()) return Value(a.as_rational() + b.as_rational());
    if (a.is_decimal() || b.is_decimal())
        return decimal_result(decimal_proxy(a) + decimal_proxy(b));
    if (a.is_surd() && b.is_surd() && !same_radicand(a, b))
        return decimal_result(decimal_proxy(a) + decimal_proxy(b));
    const BigInt d = a.is_surd() ? a.as_surd().radicand : b.as_surd().radicand;
    const SurdParts pa = parts_of(a, d);
    const SurdParts pb = parts_of(b, d);
    return make_surd(pa.a + pb.a, pa.b + pb.b, d);
}

Value value_neg(const Value& a) {
    if (a.is_rational()) return Value(-a.as_rational());
    if (a.is_surd()) {
        const Surd& s = a.as_surd();
        return Value(Surd{-s.rational_part, -s.coeff, s.radicand});
    }
    if (a.is_decimal()) return Value(Decimal{-a.as_decimal().mantissa, a.as_decimal().exponent});
    if (a.is_polynomial()) return Value(-a.as_polynomial());
    bad_operands("-");
}

Value value_sub(const Value& a, const Value& b) { return value_add(a, value_neg(b)); }

Value value_mul(const Value& a, const Value& b) {
    if (a.is_polynomial() || b.is_polynomial()) {
        if ((a.is_polynomial() || a.is_rational()) && (b.is_polynomial() || b.is_rational())) {
            const Polynomial pa = a.is_polynomial() ? a.as_polynomial() : Polynomial::constant(a.as_rational());
            const Polynomial pb = b.is_polynomial() ? b.as_polynomial() : Polynomial::constant(b.as_rational());
            return Value(pa * pb);
        }
        bad_operands("*");
    }
    if (!a.is_numeric() || !b.is_numeric()) bad_operands("*");
    if (a.is_rational() && b.is_rational()) return Value(a.as_rational() * b.as_rational());
    if (a.is_decimal() || b.is_decimal())
        return decimal_result(decimal_proxy(a) * decimal_proxy(b));
    if (a.is_surd() && b.is_surd()) {
        const Surd& x = a.as_surd();
        const Surd& y = b.as_surd();
        if (x.radicand != y.radicand)
            return decimal_result(decimal_proxy(a) * decimal_proxy(b));
        // (a1 + b1 r)(a2 + b2 r) with r^2 = d.
        const Rational ra = x.rational_part * y.rational_part +
                            x.coeff * y.coeff * Rational(x.radicand);
        const Rational rb = x.rational_part * y.coeff + x.coeff * y.rational_part;
        return make_surd(ra, rb, x.radicand);
    }
    const Surd& s = a.is_surd() ? a.as_surd() : b.as_surd();
    const Rational& r = a.is_surd() ? b.as_rational() : a.as_rational();
    return make_surd(s.rational_part * r, s.coeff * r, s.radicand);
}

Value value_div(const Value& a, const Value& b) {
    if (a.is_polynomial() || b.is_polynomial()) {
        Polynomial pb = b.is_polynomial() ? b.as_polynomial()
                        : b.is_rational() ? Polynomial::constant(b.as_rational())
                                          : Polynomial();
        if ((a.is_polynomial() || a.is_rational()) && (b.is_polynomial() || b.is_rational()) &&
            pb.is_constant()) {
            if (pb.constant_value().is_zero()) throw ValueError("division by zero");
            const Polynomial pa = a.is_polynomial() ? a.as_polynomial() : Polynomial::constant(a.as_rational());
            return Value(pa * Polynomial::constant(Rational(1) / pb.constant_value()));
        }
        bad_operands("/");
    }
    if (!a.is_numeric() || !b.is_numeric()) bad_operands("/");
    if (b.is_rational()) {
        if (b.as_rational().is_zero()) throw ValueError("division by zero");
        if (a.is_rational()) return Value(a.as_rational() / b.as_rational());
        if (a.is_surd()) {
            const Surd& s = a.as_surd();
            return make_surd(s.rational_part / b.as_rational(), s.coeff / b.as_rational(), s.radicand);
        }
        return decimal_result(decimal_proxy(a) / b.as_rational());
    }
    if (b.is_surd()) {
        const Surd& s = b.as_surd();
        // multiply by the conjugate: 1/(a + b r) = (a - b r)/(a^2 - b^2 d)
        const Rational norm = s.rational_part * s.rational_part -
                              s.coeff * s.coeff * Rational(s.radicand);
        if (norm.is_zero()) throw ValueError("division by zero");
        const Value conj = make_surd(s.rational_part / norm, -s.coeff / norm, s.radicand);
        return value_mul(a, conj);
    }
    // decimal divisor
    const Rational q = decimal_proxy(b);
    if (q.is_zero()) throw ValueError("division by zero");
    return decimal_result(decimal_proxy(a) / q);
}

Value value_pow(const Value& base, const Rational& exponent) {
    if (!exponent.is_integer()) throw ValueError("exponent must be an integer");
    const BigInt eb = exponent.num();
    if (boost::multiprecision::abs(eb) > 4096) throw ValueError("exponent too large");
    const long e = static_cast<long>(eb);

    if (base.is_polynomial()) {
        if (e < 0) {
            if (base.as_polynomial().is_constant())
                return value_pow(Value(base.as_polynomial().constant_value()), exponent);
            throw ValueError("negative power of a symbolic expression");
        }
        if (e > 64) throw ValueError("exponent too large for a symbolic base");
        return Value(base.as_polynomial().pow(static_cast<unsigned>(e)));
    }
    if (base.is_rational()) return Value(base.as_rational().pow(e));
    if (base.is_surd()) {
        if (e == 0) return Value(Rational(1));
        Value acc = Value(Rational(1));
        const bool inv = e < 0;
        long k = inv ? -e : e;
        Value b = base;
        while (k > 0) {
            if (k & 1) acc = value_mul(acc, b);
            k >>= 1;
            if (k) b = value_mul(b, b);
        }
        return inv ? value_div(Value(Rational(1)), acc) : acc;
    }
    if (base.is_decimal()) return decimal_result(decimal_proxy(base).pow(e));
    bad_operands("^");
}

int compare_numeric(const Value& a, const Value& b) {
    if (!a.is_numeric() || !b.is_numeric()) throw ValueError("comparison requires numeric values");
    if (a.is_rational() && b.is_rational()) {
        const Rational& x = a.as_rational();
        const Rational& y = b.as_rational();
        return x == y ? 0 : (x < y ? -1 : 1);
    }
    if (!a.is_decimal() && !b.is_decimal() && (a.is_surd() || b.is_surd())) {
        // Exact: bring to x + y*sqrt(d) and take the sign.
        if (!(a.is_surd() && b.is_surd()) || same_radicand(a, b)) {
            const BigInt d = a.is_surd() ? a.as_surd().radicand : b.as_surd().radicand;
            const SurdParts pa = parts_of(a, d);
            const SurdParts pb = parts_of(b, d);
            const Rational x = pa.a - pb.a;
            const Rational y = pa.b - pb.b;
            if (y.is_zero()) return x.is_zero() ? 0 : (x.is_negative() ? -1 : 1);
            if (x.is_zero()) return y.is_negative() ? -1 : 1;
            if (!x.is_negative() && !y.is_negative()) return 1;
            if (x.is_negative() && y.is_negative()) return -1;
            // Opposite signs: compare x^2 with y^2 d (sqrt(d) irrational, no tie).
            const Rational lhs = x * x;
            const Rational rhs = y * y * Rational(d);
            const bool x_positive = !x.is_negative();
            if (lhs == rhs) throw ValueError("irrational comparison degenerated");
            const bool x_wins = lhs > rhs;
            return x_positive == x_wins ? 1 : -1;
        }
    }
    // Mixed radicands or decimals: 24-digit rational proxies. Distinct exact
    // values of the forms produced here differ well above that resolution.
    const Rational x = decimal_proxy(a);
    const Rational y = decimal_proxy(b);
    return x == y ? 0 : (x < y ? -1 : 1);
}

Value sqrt_value(const Value& v) {
    if (v.is_rational()) {
        const Rational& r = v.as_rational();
        if (r.is_negative()) throw ValueError("square root of a negative number");
        if (r.is_zero()) return Value(Rational(0));
        // sqrt(p/q) = sqrt(p*q)/q
        const auto dec = square_decompose(r.num() * r.den());
        if (dec) {
            const auto& [s, d] = *dec;
            if (d == 1) return Value(Rational(s, r.den()));
            return make_surd(Rational(0), Rational(s, r.den()), d);
        }
        // Cannot certify squarefreeness: 12-digit decimal.
        const BigInt scale = pow10(24);
        const Rational approx(isqrt(r.num() * r.den() * scale * scale), r.den() * scale);
        return decimal_result(approx);
    }
    if (v.is_surd() || v.is_decimal()) {
        const Rational r = decimal_proxy(v);
        if (r.is_negative()) throw ValueError("square root of a negative number");
        if (r.is_zero()) return Value(Rational(0));
        const BigInt scale = pow10(24);
        const Rational approx(isqrt(r.num() * r.den() * scale * scale), r.den() * scale);
        return decimal_result(approx);
    }
    throw ValueError("sqrt expects a numeric value");
}

Value abs_value(const Value& v) {
    if (!v.is_numeric()) throw ValueError("abs expects a numeric value");
    return compare_numeric(v, Value(Rational(0))) < 0 ? value_neg(v) : v;
}

Value floor_value(const Value& v) {
    if (v.is_rational()) return Value(Rational(v.as_rational().floor()));
    if (v.is_decimal()) {
        const Decimal& d = v.as_decimal();
        if (d.exponent >= 0) return Value(d.to_rational());
        return Value(Rational(d.to_rational().floor()));
    }
    if (v.is_surd()) {
        // Start from the proxy and correct by exact comparison.
        BigInt f = numeric_to_rational(v).floor();
        while (compare_numeric(v, Value(Rational(f))) < 0) f -= 1;
        while (compare_numeric(v, Value(Rational(f + 1))) >= 0) f += 1;
        return Value(Rational(f));
    }
    throw ValueError("floor expects a numeric value");
}

Value evalf_value(const Value& v) {
    if (!v.is_numeric()) throw ValueError("evalf expects a numeric value");
    if (v.is_decimal()) return v;
    return Value(Decimal::from_rational(decimal_proxy(v)));
}

bool values_identical(const Value& a, const Value& b) {
    if (a.data().index() != b.data().index()) return false;
    if (a.is_rational()) return a.as_rational() == b.as_rational();
    if (a.is_surd()) return a.as_surd() == b.as_surd();
    if (a.is_decimal()) return a.as_decimal() == b.as_decimal();
    if (a.is_bool()) return a.as_bool() == b.as_bool();
    if (a.is_polynomial()) return a.as_polynomial() == b.as_polynomial();
    return canonicalize_value(a) == canonicalize_value(b);
}

} // namespace mathforge::lang
