#include "mathforge/solver.hpp"

#include <algorithm>
#include <set>

namespace mathforge::lang {

Value poly_eval(const Polynomial& p, const std::map<std::string, Value>& bindings) {
    // Fold exact rational bindings in symbolically first.
    Polynomial q = p;
    for (const auto& [name, v] : bindings)
        if (v.is_rational()) q = q.substitute(name, Polynomial::constant(v.as_rational()));
    if (q.is_constant()) return Value(q.constant_value());

    for (const auto& name : q.variables())
        if (!bindings.count(name)) throw ValueError("unbound variable '" + name + "'");

    Value acc{Rational(0)};
    for (const auto& [mono, coeff] : q.terms()) {
        Value term{coeff};
        for (const auto& [var, exp] : mono)
            term = value_mul(term, value_pow(bindings.at(var), Rational(exp)));
        acc = value_add(acc, term);
    }
    return acc;
}

namespace {

bool is_linear(const Polynomial& p) { return p.total_degree() <= 1; }

// Decide "value `op` 0" exactly.
bool satisfies(const Value& value, const std::string& op) {
    const int c = compare_numeric(value, Value(Rational(0)));
    if (op == "==") return c == 0;
    if (op == "<") return c < 0;
    if (op == "<=") return c <= 0;
    if (op == ">") return c > 0;
    if (op == ">=") return c >= 0;
    throw ValueError("unknown relation '" + op + "'");
}

} // namespace

SolutionSet solve_system(std::vector<Polynomial> equations,
                         const std::vector<std::string>& targets,
                         const std::vector<PolyConstraint>& inequalities) {
    if (targets.empty()) throw ValueError("solve needs at least one variable");

    // Variables eliminated so far, each expressed in the remaining variables.
    std::map<std::string, Polynomial> eliminated;
    bool inconsistent = false;

    auto substitute_everywhere = [&](const std::string& var, const Polynomial& expr) {
        for (auto& [v, e] : eliminated) e = e.substitute(var, expr);
        for (auto& p : equations) p = p.substitute(var, expr);
        eliminated.emplace(var, expr);
    };

    // Iterated linear elimination; leaves only non-linear equations behind.
    while (!inconsistent) {
        bool progressed = false;
        for (auto it = equations.begin(); it != equations.end();) {
            if (it->is_constant()) {
                if (!it->constant_value().is_zero()) inconsistent = true;
                it = equations.erase(it);
                progressed = true;
                continue;
            }
            if (is_linear(*it)) {
                // a*v + rest = 0  =>  v = -rest/a, for the alphabetically
                // first variable (deterministic pivot choice).
                const std::string v = *it->variables().begin();
                const Polynomial a = it->coefficient_of(v, 1);
                const Polynomial rest = it->coefficient_of(v, 0);
                const Rational ac = a.constant_value();  // linear => constant
                const Polynomial expr = rest * Polynomial::constant(Rational(-1) / ac);
                equations.erase(it);
                substitute_everywhere(v, expr);
                progressed = true;
                break;  // restart: substitution may have changed everything
            }
            ++it;
        }
        if (!progressed) break;
    }

    if (inconsistent) return SolutionSet{};

    // Each surviving alternative is a complete assignment for the variables
    // that actually occur in the system.
    std::vector<std::map<std::string, Value>> assignments;

    if (equations.empty()) {
        std::map<std::string, Value> a;
        for (const auto& [v, e] : eliminated) {
            if (!e.is_constant())
                throw ValueError("underdetermined system: '" + v + "' depends on a free variable");
            a.emplace(v, Value(e.constant_value()));
        }
        assignments.push_back(std::move(a));
    } else if (equations.size() == 1 && equations[0].variables().size() == 1 &&
               equations[0].degree_in(*equations[0].variables().begin()) == 2) {
        const Polynomial& q = equations[0];
        const std::string v = *q.variables().begin();
        const Rational a = q.coefficient_of(v, 2).constant_value();
        const Rational b = q.coefficient_of(v, 1).constant_value();
        const Rational c = q.coefficient_of(v, 0).constant_value();
        const Rational disc = b * b - Rational(4) * a * c;
        std::vector<Value> roots;
        if (disc.is_zero()) {
            roots.emplace_back(-b / (Rational(2) * a));
        } else if (!disc.is_negative()) {
            const Value s = sqrt_value(Value(disc));
            const Value two_a{Rational(2) * a};
            roots.push_back(value_div(value_add(Value(-b), s), two_a));
            roots.push_back(value_div(value_sub(Value(-b), s), two_a));
        }
        for (const Value& root : roots) {
            std::map<std::string, Value> assign;
            assign.emplace(v, root);
            bool ok = true;
            for (const auto& [ev, ee] : eliminated) {
                try {
                    std::map<std::string, Value> bind{{v, root}};
                    assign.emplace(ev, poly_eval(ee, bind));
                } catch (const ValueError&) {
                    ok = false;  // depends on something still free
                    break;
                }
            }
            if (!ok) throw ValueError("underdetermined system");
            assignments.push_back(std::move(assign));
        }
    } else {
        throw ValueError("unsupported equation system");
    }

    // Inequality constraints filter alternatives; they must be decidable
    // under the assignment.
    SolutionSet out;
    std::set<std::string> seen;
    for (const auto& assign : assignments) {
        bool keep = true;
        for (const auto& cons : inequalities) {
            // Constraints over symbols the system never determined restrict
            // unrelated free symbols; skip them rather than guess.
            bool covered = true;
            for (const auto& v : cons.poly.variables())
                if (!assign.count(v)) { covered = false; break; }
            if (!covered) continue;
            const Value val = poly_eval(cons.poly, assign);
            if (!satisfies(val, cons.op)) {
                keep = false;
                break;
            }
        }
        if (!keep) continue;

        SolutionAlternative alt;
        std::vector<std::string> sorted_targets = targets;
        std::sort(sorted_targets.begin(), sorted_targets.end());
        sorted_targets.erase(std::unique(sorted_targets.begin(), sorted_targets.end()),
                             sorted_targets.end());
        for (const auto& t : sorted_targets) {
            const auto it = assign.find(t);
            if (it == assign.end())
                throw ValueError("variable '" + t + "' is not determined by the system");
            alt.push_back(SolutionBinding{t, it->second});
        }
        Value probe{SolutionSet{{alt}}};
        const std::string text = canonicalize_value(probe);
        if (seen.insert(text).second) out.alternatives.push_back(std::move(alt));
    }

    std::sort(out.alternatives.begin(), out.alternatives.end(),
              [](const SolutionAlternative& x, const SolutionAlternative& y) {
                  return canonicalize_value(Value(SolutionSet{{x}})) <
                         canonicalize_value(Value(SolutionSet{{y}}));
              });
    return out;
}

} // namespace mathforge::lang
