#include "mathforge/interpreter.hpp"

#include "mathforge/parser.hpp"
#include "mathforge/solver.hpp"

#include <chrono>

namespace mathforge::lang {

std::string exec_status_name(ExecStatus s) {
    switch (s) {
    case ExecStatus::Ok: return "Ok";
    case ExecStatus::ParseError: return "ParseError";
    case ExecStatus::RuntimeError: return "RuntimeError";
    case ExecStatus::StepLimitExceeded: return "StepLimitExceeded";
    case ExecStatus::TimeLimit: return "TimeLimit";
    }
    return "Unknown";
}

namespace {

struct StepLimitHit {};
struct TimeLimitHit {};

using Clock = std::chrono::steady_clock;

Polynomial to_poly(const Value& v, const char* what) {
    if (v.is_rational()) return Polynomial::constant(v.as_rational());
    if (v.is_polynomial()) return v.as_polynomial();
    throw ValueError(std::string(what) + " must be a polynomial expression");
}

class Interpreter {
public:
    Interpreter(const Limits& limits)
        : limits_(limits), deadline_(Clock::now() + std::chrono::milliseconds(limits.timeout_ms)) {}

    ExecutionResult run(const Program& p) {
        ExecutionResult result;
        try {
            for (std::size_t i = 0; i < p.statements.size(); ++i)
                exec_stmt(p.statements[i], /*top_level_index=*/static_cast<long>(i), result);
            if (!output_) throw ValueError("program produced no output");
            result.status = ExecStatus::Ok;
            result.output = output_;
            result.canonical_text = canonicalize_value(*output_);
        } catch (const StepLimitHit&) {
            result.status = ExecStatus::StepLimitExceeded;
            result.message = "step limit exceeded";
        } catch (const TimeLimitHit&) {
            result.status = ExecStatus::TimeLimit;
            result.message = "time limit exceeded";
        } catch (const std::exception& e) {
            result.status = ExecStatus::RuntimeError;
            result.message = e.what();
        }
        result.steps_used = steps_;
        return result;
    }

private:
    void step() {
        if (++steps_ > limits_.max_steps) throw StepLimitHit{};
        if ((steps_ & 63) == 0 && Clock::now() > deadline_) throw TimeLimitHit{};
    }

    void check_nodes(const Value& v) {
        if (v.node_count() > limits_.max_nodes) throw ValueError("value node limit exceeded");
    }

    void exec_stmt(const StmtPtr& s, long top_level_index, ExecutionResult& result) {
        step();
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, SymStmt>) {
                    for (const auto& n : x.names) env_[n] = Value(Polynomial::variable(n));
                } else if constexpr (std::is_same_v<T, AssignStmt>) {
                    Value v = eval(x.value);
                    check_nodes(v);
                    env_[x.name] = v;
                    if (top_level_index >= 0)
                        result.trace.push_back(
                            TraceEntry{static_cast<std::size_t>(top_level_index), x.name, v});
                } else if constexpr (std::is_same_v<T, AssumeStmt>) {
                    exec_assume(x);
                } else if constexpr (std::is_same_v<T, ForStmt>) {
                    for (long k = x.from; k <= x.to; ++k) {
                        step();
                        env_[x.var] = Value(Rational(k));
                        for (const auto& b : x.body) exec_stmt(b, -1, result);
                    }
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    const Value c = eval(x.condition);
                    if (!c.is_bool()) throw ValueError("if condition is not decidable");
                    const auto& body = c.as_bool() ? x.then_body : x.else_body;
                    for (const auto& b : body) exec_stmt(b, -1, result);
                } else {  // PrintStmt
                    Value v = eval(x.value);
                    check_nodes(v);
                    output_ = std::move(v);
                }
            },
            s->node);
    }

    void exec_assume(const AssumeStmt& stmt) {
        const auto& cmp = std::get<Compare>(stmt.condition->node);
        const Value l = eval(cmp.lhs);
        const Value r = eval(cmp.rhs);
        if (l.is_numeric() && r.is_numeric()) {
            if (!numeric_relation(cmp.op, l, r)) throw ValueError("assumption is violated");
            return;
        }
        // Symbolic: record lhs - rhs `op` 0 for the solver.
        const Polynomial diff =
            to_poly(value_sub(l, r), "assumption");
        if (diff.is_constant()) {
            if (!satisfies_constant(cmp.op, diff.constant_value()))
                throw ValueError("assumption is violated");
            return;
        }
        assumptions_.push_back(PolyConstraint{cmp.op, diff});
    }

    static bool satisfies_constant(const std::string& op, const Rational& v) {
        if (op == "==") return v.is_zero();
        if (op == "<") return v.is_negative();
        if (op == "<=") return v.is_negative() || v.is_zero();
        if (op == ">") return !v.is_negative() && !v.is_zero();
        return !v.is_negative();  // >=
    }

    static bool numeric_relation(const std::string& op, const Value& l, const Value& r) {
        const int c = compare_numeric(l, r);
        if (op == "==") return c == 0;
        if (op == "<") return c < 0;
        if (op == "<=") return c <= 0;
        if (op == ">") return c > 0;
        return c >= 0;  // >=
    }

    Value eval(const ExprPtr& e) {
        step();
        Value out = std::visit(
            [&](const auto& x) -> Value {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, NumberLit>) {
                    return Value(Rational(x.value));
                } else if constexpr (std::is_same_v<T, VarRef>) {
                    const auto it = env_.find(x.name);
                    if (it == env_.end()) throw ValueError("unbound variable '" + x.name + "'");
                    return it->second;
                } else if constexpr (std::is_same_v<T, Unary>) {
                    return value_neg(eval(x.operand));
                } else if constexpr (std::is_same_v<T, Binary>) {
                    return eval_binary(x);
                } else if constexpr (std::is_same_v<T, Compare>) {
                    return eval_compare(x);
                } else if constexpr (std::is_same_v<T, Call>) {
                    return eval_call(x);
                } else {  // ListLit
                    ValueList items;
                    items.reserve(x.items.size());
                    for (const auto& i : x.items) items.push_back(eval(i));
                    return Value(std::move(items));
                }
            },
            e->node);
        check_nodes(out);
        return out;
    }

    Value eval_binary(const Binary& b) {
        const Value l = eval(b.lhs);
        const Value r = eval(b.rhs);
        switch (b.op) {
        case '+': return value_add(l, r);
        case '-': return value_sub(l, r);
        case '*': return value_mul(l, r);
        case '/': return value_div(l, r);
        default:
            if (!r.is_rational()) throw ValueError("exponent must be an integer");
            return value_pow(l, r.as_rational());
        }
    }

    Value eval_compare(const Compare& c) {
        const Value l = eval(c.lhs);
        const Value r = eval(c.rhs);
        if (l.is_numeric() && r.is_numeric()) return Value(numeric_relation(c.op, l, r));
        if ((l.is_polynomial() || l.is_rational()) && (r.is_polynomial() || r.is_rational())) {
            const Polynomial diff = to_poly(value_sub(l, r), "comparison");
            if (diff.is_constant()) return Value(satisfies_constant(c.op, diff.constant_value()));
            if (c.op == "==" ) throw ValueError("cannot decide a symbolic equality");
            throw ValueError("cannot decide a symbolic relation");
        }
        if (l.is_bool() && r.is_bool() && c.op == "==") return Value(l.as_bool() == r.as_bool());
        throw ValueError("cannot compare these values");
    }

    Value eval_call(const Call& call) {
        const std::string& f = call.name;
        // Special forms that need the argument syntax, not just values.
        if (f == "solve") return eval_solve(call);
        if (f == "sum") return eval_sum(call);
        if (f == "subst") return eval_subst(call);
        if (f == "deriv") return eval_deriv(call);

        std::vector<Value> args;
        args.reserve(call.args.size());
        for (const auto& a : call.args) args.push_back(eval(a));

        if (f == "expand" || f == "simplify") {
            // Values already live in expanded normal form; these are the
            // identity on anything numeric or polynomial.
            if (args[0].is_numeric() || args[0].is_polynomial()) return args[0];
            throw ValueError(f + " expects a numeric or symbolic argument");
        }
        if (f == "gcd" || f == "lcm") {
            if (!args[0].is_rational() || !args[1].is_rational())
                throw ValueError(f + " expects rational arguments");
            return f == "gcd" ? Value(rational_gcd(args[0].as_rational(), args[1].as_rational()))
                              : Value(rational_lcm(args[0].as_rational(), args[1].as_rational()));
        }
        if (f == "abs") return abs_value(args[0]);
        if (f == "sqrt") return sqrt_value(args[0]);
        if (f == "pow") {
            if (!args[1].is_rational()) throw ValueError("exponent must be an integer");
            return value_pow(args[0], args[1].as_rational());
        }
        if (f == "evalf") return evalf_value(args[0]);
        if (f == "min" || f == "max") {
            const int c = compare_numeric(args[0], args[1]);
            return (f == "min") == (c <= 0) ? args[0] : args[1];
        }
        if (f == "floor") return floor_value(args[0]);
        if (f == "mod") {
            if (!args[0].is_rational() || !args[1].is_rational())
                throw ValueError("mod expects rational arguments");
            const Rational& a = args[0].as_rational();
            const Rational& m = args[1].as_rational();
            if (m.is_zero()) throw ValueError("mod by zero");
            return Value(a - m * Rational((a / m).floor()));
        }
        throw ValueError("unknown builtin '" + f + "'");
    }

    Value eval_solve(const Call& call) {
        const auto* eq_list = std::get_if<ListLit>(&call.args[0]->node);
        if (!eq_list) throw ValueError("solve expects a list of equations");
        std::vector<Polynomial> eqs;
        for (const auto& item : eq_list->items) {
            const auto* cmp = std::get_if<Compare>(&item->node);
            if (!cmp || cmp->op != "==")
                throw ValueError("solve equations must be written with ==");
            eqs.push_back(to_poly(value_sub(eval(cmp->lhs), eval(cmp->rhs)), "equation"));
        }
        const auto* var_list = std::get_if<ListLit>(&call.args[1]->node);
        if (!var_list || var_list->items.empty())
            throw ValueError("solve expects a non-empty list of variables");
        std::vector<std::string> targets;
        for (const auto& item : var_list->items) {
            const auto* v = std::get_if<VarRef>(&item->node);
            if (!v) throw ValueError("solve variables must be plain symbols");
            targets.push_back(v->name);
        }

        std::vector<PolyConstraint> filters;
        for (const auto& c : assumptions_) {
            if (c.op == "==") eqs.push_back(c.poly);
            else filters.push_back(c);
        }
        return Value(solve_system(std::move(eqs), targets, filters));
    }

    Value eval_sum(const Call& call) {
        const auto* idx = std::get_if<VarRef>(&call.args[0]->node);
        if (!idx) throw ValueError("sum index must be a plain symbol");
        const Value from_v = eval(call.args[1]);
        const Value to_v = eval(call.args[2]);
        if (!from_v.is_rational() || !from_v.as_rational().is_integer() || !to_v.is_rational() ||
            !to_v.as_rational().is_integer())
            throw ValueError("sum bounds must be integers");
        const BigInt from = from_v.as_rational().num();
        const BigInt to = to_v.as_rational().num();
        if (to - from > kMaxLoopSpan) throw ValueError("sum range too large");

        // Evaluate the body with the index symbolic, then substitute per term.
        const auto saved = env_.find(idx->name);
        std::optional<Value> old;
        if (saved != env_.end()) old = saved->second;
        env_[idx->name] = Value(Polynomial::variable(idx->name));
        Value body;
        try {
            body = eval(call.args[3]);
        } catch (...) {
            restore(idx->name, old);
            throw;
        }
        restore(idx->name, old);

        if (body.is_numeric() && !body.is_rational()) {
            // Index-free body: the sum is count * body.
            const Rational count = from > to ? Rational(0) : Rational(to - from + 1);
            return value_mul(Value(count), body);
        }
        const Polynomial pbody = to_poly(body, "sum body");
        Polynomial acc;
        for (BigInt k = from; k <= to; ++k) {
            step();
            acc = acc + pbody.substitute(idx->name, Polynomial::constant(Rational(k)));
            if (acc.node_count() > limits_.max_nodes) throw ValueError("value node limit exceeded");
        }
        if (acc.is_constant()) return Value(acc.constant_value());
        return Value(acc);
    }

    Value eval_subst(const Call& call) {
        const Value target = eval(call.args[0]);
        const auto* var = std::get_if<VarRef>(&call.args[1]->node);
        if (!var) throw ValueError("subst variable must be a plain symbol");
        const Value replacement = eval(call.args[2]);

        if (target.is_numeric()) return target;
        if (!target.is_polynomial()) throw ValueError("subst expects a symbolic expression");
        const Polynomial& p = target.as_polynomial();

        if (replacement.is_rational() || replacement.is_polynomial()) {
            const Polynomial rp = replacement.is_rational()
                                      ? Polynomial::constant(replacement.as_rational())
                                      : replacement.as_polynomial();
            const Polynomial q = p.substitute(var->name, rp);
            if (q.is_constant()) return Value(q.constant_value());
            return Value(q);
        }
        if (replacement.is_numeric()) {
            std::map<std::string, Value> bind{{var->name, replacement}};
            return poly_eval(p, bind);  // throws if other symbols remain
        }
        throw ValueError("subst replacement must be numeric or symbolic");
    }

    Value eval_deriv(const Call& call) {
        const Value target = eval(call.args[0]);
        const auto* var = std::get_if<VarRef>(&call.args[1]->node);
        if (!var) throw ValueError("deriv variable must be a plain symbol");
        if (target.is_numeric()) return Value(Rational(0));
        if (!target.is_polynomial()) throw ValueError("deriv expects a symbolic expression");
        const Polynomial d = target.as_polynomial().derivative(var->name);
        if (d.is_constant()) return Value(d.constant_value());
        return Value(d);
    }

    void restore(const std::string& name, const std::optional<Value>& old) {
        if (old) env_[name] = *old;
        else env_.erase(name);
    }

    const Limits& limits_;
    Clock::time_point deadline_;
    long steps_ = 0;
    std::map<std::string, Value> env_;
    std::vector<PolyConstraint> assumptions_;
    std::optional<Value> output_;
};

} // namespace

ExecutionResult execute(const Program& p, const Limits& limits) {
    Interpreter interp(limits);
    return interp.run(p);
}

ExecutionResult run_source(const std::string& source, const Limits& limits) {
    try {
        const Program p = parse(source);
        return execute(p, limits);
    } catch (const ParseError& e) {
        ExecutionResult r;
        r.status = ExecStatus::ParseError;
        r.message = e.what();
        return r;
    }
}

} // namespace mathforge::lang
