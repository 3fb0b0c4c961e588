#pragma once

#include "mathforge/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mathforge::lang {

// Fixed-precision decimal: value = mantissa * 10^exponent with at most 12
// significant digits, no trailing zero digits, mantissa 0 <=> exponent 0.
// Produced when a result leaves the exact rational/surd domain.
struct Decimal {
    BigInt mantissa;
    int exponent = 0;

    static constexpr int kSignificantDigits = 12;

    Rational to_rational() const;
    static Decimal from_rational(const Rational& r);  // round-half-even to 12 digits
    std::string str() const;
    bool operator==(const Decimal& o) const { return mantissa == o.mantissa && exponent == o.exponent; }
};

// a + b*sqrt(d) with rational a, b != 0 and squarefree integer d > 1.
struct Surd {
    Rational rational_part;
    Rational coeff;
    BigInt radicand;

    // Rational approximation good to ~`digits` significant digits.
    Rational approx(int digits = 24) const;
    std::string str() const;
    bool operator==(const Surd& o) const {
        return rational_part == o.rational_part && coeff == o.coeff && radicand == o.radicand;
    }
};

// Multivariate polynomial over the rationals, kept in expanded normal form
// (no zero coefficients). This is the symbolic carrier behind unbound syms.
class Polynomial {
public:
    // (variable, positive exponent) pairs sorted by variable name.
    using Monomial = std::vector<std::pair<std::string, int>>;

    Polynomial() = default;
    static Polynomial constant(Rational c);
    static Polynomial variable(const std::string& name);

    bool is_constant() const;
    Rational constant_value() const;  // valid only when is_constant()
    bool is_zero() const { return terms_.empty(); }

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial pow(unsigned e) const;

    Polynomial substitute(const std::string& var, const Polynomial& value) const;
    Polynomial derivative(const std::string& var) const;

    int degree_in(const std::string& var) const;
    int total_degree() const;
    std::set<std::string> variables() const;
    // Coefficient of var^k with all other variables untouched; used by the solver.
    Polynomial coefficient_of(const std::string& var, int k) const;

    std::size_t term_count() const { return terms_.size(); }
    const std::map<Monomial, Rational>& terms() const { return terms_; }
    std::size_t node_count() const;
    std::string str() const;  // graded-lex descending, canonical signs
    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

private:
    void add_term(const Monomial& m, const Rational& c);
    std::map<Monomial, Rational> terms_;
};

class Value;
using ValueList = std::vector<Value>;

struct SolutionBinding;
// One alternative assignment, bindings sorted by variable name.
using SolutionAlternative = std::vector<SolutionBinding>;

struct SolutionSet {
    std::vector<SolutionAlternative> alternatives;  // sorted by canonical text
};

class Value {
public:
    using Data = std::variant<Rational, Surd, Decimal, bool, Polynomial, SolutionSet, ValueList>;

    Value() : data_(Rational(0)) {}
    Value(Rational r) : data_(std::move(r)) {}            // NOLINT: implicit by design
    Value(Surd s) : data_(std::move(s)) {}                // NOLINT
    Value(Decimal d) : data_(std::move(d)) {}             // NOLINT
    Value(bool b) : data_(b) {}                           // NOLINT
    Value(Polynomial p) : data_(std::move(p)) {}          // NOLINT
    Value(SolutionSet s) : data_(std::move(s)) {}         // NOLINT
    Value(ValueList l) : data_(std::move(l)) {}           // NOLINT

    const Data& data() const { return data_; }

    bool is_rational() const { return std::holds_alternative<Rational>(data_); }
    bool is_surd() const { return std::holds_alternative<Surd>(data_); }
    bool is_decimal() const { return std::holds_alternative<Decimal>(data_); }
    bool is_bool() const { return std::holds_alternative<bool>(data_); }
    bool is_polynomial() const { return std::holds_alternative<Polynomial>(data_); }
    bool is_solution_set() const { return std::holds_alternative<SolutionSet>(data_); }
    bool is_list() const { return std::holds_alternative<ValueList>(data_); }
    bool is_numeric() const { return is_rational() || is_surd() || is_decimal(); }

    const Rational& as_rational() const { return std::get<Rational>(data_); }
    const Surd& as_surd() const { return std::get<Surd>(data_); }
    const Decimal& as_decimal() const { return std::get<Decimal>(data_); }
    bool as_bool() const { return std::get<bool>(data_); }
    const Polynomial& as_polynomial() const { return std::get<Polynomial>(data_); }
    const SolutionSet& as_solution_set() const { return std::get<SolutionSet>(data_); }
    const ValueList& as_list() const { return std::get<ValueList>(data_); }

    std::size_t node_count() const;

private:
    Data data_;
};

struct SolutionBinding {
    std::string var;
    Value value;
};

// Stable, locale-independent rendering; the single source of truth for
// answer comparison and corpus text.
std::string canonicalize_value(const Value& v);

// Numeric construction helpers. make_surd collapses b == 0 or d == 1.
Value make_surd(Rational a, Rational b, BigInt d);

// n = s^2 * d with d squarefree. nullopt when squarefreeness cannot be
// certified (cofactor beyond the trial-division range); caller degrades
// to Decimal.
std::optional<std::pair<BigInt, BigInt>> square_decompose(const BigInt& n);

// Arithmetic over the numeric tower (Rational < Surd < Decimal fallback,
// Polynomial combines with Rational/Polynomial only). Throws ValueError on
// unsupported combinations, division by zero and resource violations.
Value value_add(const Value& a, const Value& b);
Value value_sub(const Value& a, const Value& b);
Value value_mul(const Value& a, const Value& b);
Value value_div(const Value& a, const Value& b);
Value value_neg(const Value& a);
Value value_pow(const Value& base, const Rational& exponent);

// Exact three-way comparison of numeric values; -1, 0, +1.
int compare_numeric(const Value& a, const Value& b);

Value sqrt_value(const Value& v);
Value abs_value(const Value& v);
Value floor_value(const Value& v);
Value evalf_value(const Value& v);

// Exact rational proxy for tolerance comparisons (surds approximated to
// 24 significant digits).
Rational numeric_to_rational(const Value& v);

// Structural equality used by tests and the multiset solution-set compare.
bool values_identical(const Value& a, const Value& b);

} // namespace mathforge::lang
