#include "mathforge/mutation.hpp"

#include "mathforge/parser.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace mathforge::mutation {

using lang::AssignStmt;
using lang::AssumeStmt;
using lang::BigInt;
using lang::Binary;
using lang::Call;
using lang::Compare;
using lang::ExprPtr;
using lang::ForStmt;
using lang::IfStmt;
using lang::ListLit;
using lang::make_binary;
using lang::make_call;
using lang::make_compare;
using lang::make_list;
using lang::make_number;
using lang::make_rational_literal;
using lang::make_stmt;
using lang::make_unary;
using lang::make_var;
using lang::NumberLit;
using lang::PrintStmt;
using lang::Program;
using lang::Rational;
using lang::StmtPtr;
using lang::SymStmt;
using lang::Unary;
using lang::VarRef;

std::string mutation_kind_name(MutationKind k) {
    switch (k) {
        case MutationKind::Constraint: return "Constraint";
        case MutationKind::Variable: return "Variable";
        case MutationKind::Constant: return "Constant";
        case MutationKind::Code: return "Code";
    }
    return "?";
}

bool operator==(const ComplexityScore& a, const ComplexityScore& b) {
    return a.nodes == b.nodes && a.statements == b.statements &&
           a.distinct_builtins == b.distinct_builtins &&
           a.constraint_count == b.constraint_count;
}

namespace {

// ---------------------------------------------------------------------------
// Literal traversal.  Ordinals count only *eligible* literals; positions that
// must stay integers (exponents, pow exponents, sum headers) and the solve
// variable list are walked with `excluded` set and never counted.

struct LitCtx {
    bool excluded = false;
    bool in_solve_eq = false;
};

// fn returns a replacement node or nullptr to keep the literal.
using LitFn = std::function<ExprPtr(const NumberLit&, int, const LitCtx&)>;

ExprPtr transform_expr_literals(const ExprPtr& e, int& ordinal, LitCtx ctx, const LitFn& fn) {
    return std::visit(
        [&](const auto& node) -> ExprPtr {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NumberLit>) {
                if (ctx.excluded) return e;
                const int idx = ordinal++;
                ExprPtr repl = fn(node, idx, ctx);
                return repl ? repl : e;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return e;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return make_unary(node.op, transform_expr_literals(node.operand, ordinal, ctx, fn));
            } else if constexpr (std::is_same_v<T, Binary>) {
                ExprPtr lhs = transform_expr_literals(node.lhs, ordinal, ctx, fn);
                LitCtx rhs_ctx = ctx;
                if (node.op == '^') rhs_ctx.excluded = true;
                ExprPtr rhs = transform_expr_literals(node.rhs, ordinal, rhs_ctx, fn);
                return make_binary(node.op, lhs, rhs);
            } else if constexpr (std::is_same_v<T, Compare>) {
                return make_compare(node.op,
                                    transform_expr_literals(node.lhs, ordinal, ctx, fn),
                                    transform_expr_literals(node.rhs, ordinal, ctx, fn));
            } else if constexpr (std::is_same_v<T, Call>) {
                std::vector<ExprPtr> args;
                for (std::size_t i = 0; i < node.args.size(); ++i) {
                    LitCtx arg_ctx = ctx;
                    if (node.name == "pow" && i == 1) arg_ctx.excluded = true;
                    if (node.name == "sum" && i <= 2) arg_ctx.excluded = true;
                    if (node.name == "solve") {
                        if (i == 0) arg_ctx.in_solve_eq = true;
                        if (i == 1) arg_ctx.excluded = true;
                    }
                    args.push_back(transform_expr_literals(node.args[i], ordinal, arg_ctx, fn));
                }
                return make_call(node.name, std::move(args));
            } else {
                static_assert(std::is_same_v<T, ListLit>);
                std::vector<ExprPtr> items;
                for (const auto& it : node.items)
                    items.push_back(transform_expr_literals(it, ordinal, ctx, fn));
                return make_list(std::move(items));
            }
        },
        e->node);
}

// Walks every expression slot of a statement, nested bodies included.
StmtPtr transform_stmt_literals(const StmtPtr& s, int& ordinal, const LitFn& fn) {
    return std::visit(
        [&](const auto& node) -> StmtPtr {
            using T = std::decay_t<decltype(node)>;
            LitCtx ctx;
            if constexpr (std::is_same_v<T, SymStmt>) {
                return s;
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
                return make_stmt(AssignStmt{
                    node.name, transform_expr_literals(node.value, ordinal, ctx, fn)});
            } else if constexpr (std::is_same_v<T, AssumeStmt>) {
                return make_stmt(AssumeStmt{
                    transform_expr_literals(node.condition, ordinal, ctx, fn)});
            } else if constexpr (std::is_same_v<T, ForStmt>) {
                ForStmt out;
                out.var = node.var;
                out.from = node.from;
                out.to = node.to;
                for (const auto& b : node.body)
                    out.body.push_back(transform_stmt_literals(b, ordinal, fn));
                return make_stmt(std::move(out));
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                IfStmt out;
                out.condition = transform_expr_literals(node.condition, ordinal, ctx, fn);
                for (const auto& b : node.then_body)
                    out.then_body.push_back(transform_stmt_literals(b, ordinal, fn));
                for (const auto& b : node.else_body)
                    out.else_body.push_back(transform_stmt_literals(b, ordinal, fn));
                return make_stmt(std::move(out));
            } else {
                static_assert(std::is_same_v<T, PrintStmt>);
                return make_stmt(PrintStmt{
                    transform_expr_literals(node.value, ordinal, ctx, fn)});
            }
        },
        s->node);
}

struct LiteralSite {
    std::size_t stmt_index = 0;  // top-level index
    int ordinal = 0;             // eligible-literal ordinal within that stmt
    BigInt value;
    bool in_solve_eq = false;
};

std::vector<LiteralSite> collect_literal_sites(const Program& p, bool top_level_only) {
    std::vector<LiteralSite> sites;
    for (std::size_t i = 0; i < p.statements.size(); ++i) {
        if (top_level_only) {
            const auto& node = p.statements[i]->node;
            if (!std::holds_alternative<AssignStmt>(node) &&
                !std::holds_alternative<PrintStmt>(node))
                continue;
        }
        int ordinal = 0;
        transform_stmt_literals(p.statements[i], ordinal,
                                [&](const NumberLit& lit, int idx, const LitCtx& ctx) -> ExprPtr {
                                    sites.push_back(LiteralSite{i, idx, lit.value, ctx.in_solve_eq});
                                    return nullptr;
                                });
    }
    return sites;
}

// Replaces the literal at (site.stmt_index, site.ordinal); returns the new
// statement and fills before/after with the rendered old and new nodes.
StmtPtr replace_literal(const Program& p, const LiteralSite& site, const ExprPtr& replacement,
                        std::string& before, std::string& after) {
    int ordinal = 0;
    return transform_stmt_literals(
        p.statements[site.stmt_index], ordinal,
        [&](const NumberLit& lit, int idx, const LitCtx&) -> ExprPtr {
            if (idx != site.ordinal) return nullptr;
            before = lang::render_expr(make_number(lit.value));
            after = lang::render_expr(replacement);
            return replacement;
        });
}

// ---------------------------------------------------------------------------
// Builtin-call traversal (for the equal-arity swap).

const std::map<std::string, std::string>& swap_table() {
    static const std::map<std::string, std::string> table = {
        {"min", "max"}, {"max", "min"},         {"gcd", "lcm"},      {"lcm", "gcd"},
        {"expand", "simplify"}, {"simplify", "expand"}, {"abs", "floor"}, {"floor", "abs"},
    };
    return table;
}

using CallFn = std::function<bool(const Call&, int)>;  // true => swap this call

ExprPtr transform_expr_calls(const ExprPtr& e, int& ordinal, const CallFn& fn) {
    return std::visit(
        [&](const auto& node) -> ExprPtr {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NumberLit> || std::is_same_v<T, VarRef>) {
                return e;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return make_unary(node.op, transform_expr_calls(node.operand, ordinal, fn));
            } else if constexpr (std::is_same_v<T, Binary>) {
                ExprPtr lhs = transform_expr_calls(node.lhs, ordinal, fn);
                ExprPtr rhs = transform_expr_calls(node.rhs, ordinal, fn);
                return make_binary(node.op, lhs, rhs);
            } else if constexpr (std::is_same_v<T, Compare>) {
                return make_compare(node.op, transform_expr_calls(node.lhs, ordinal, fn),
                                    transform_expr_calls(node.rhs, ordinal, fn));
            } else if constexpr (std::is_same_v<T, Call>) {
                std::string name = node.name;
                if (swap_table().count(node.name)) {
                    const int idx = ordinal++;
                    if (fn(node, idx)) name = swap_table().at(node.name);
                }
                std::vector<ExprPtr> args;
                for (const auto& a : node.args)
                    args.push_back(transform_expr_calls(a, ordinal, fn));
                return make_call(std::move(name), std::move(args));
            } else {
                static_assert(std::is_same_v<T, ListLit>);
                std::vector<ExprPtr> items;
                for (const auto& it : node.items)
                    items.push_back(transform_expr_calls(it, ordinal, fn));
                return make_list(std::move(items));
            }
        },
        e->node);
}

StmtPtr transform_stmt_calls(const StmtPtr& s, int& ordinal, const CallFn& fn) {
    return std::visit(
        [&](const auto& node) -> StmtPtr {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, SymStmt>) {
                return s;
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
                return make_stmt(AssignStmt{node.name,
                                            transform_expr_calls(node.value, ordinal, fn)});
            } else if constexpr (std::is_same_v<T, AssumeStmt>) {
                return make_stmt(AssumeStmt{transform_expr_calls(node.condition, ordinal, fn)});
            } else if constexpr (std::is_same_v<T, ForStmt>) {
                ForStmt out;
                out.var = node.var;
                out.from = node.from;
                out.to = node.to;
                for (const auto& b : node.body)
                    out.body.push_back(transform_stmt_calls(b, ordinal, fn));
                return make_stmt(std::move(out));
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                IfStmt out;
                out.condition = transform_expr_calls(node.condition, ordinal, fn);
                for (const auto& b : node.then_body)
                    out.then_body.push_back(transform_stmt_calls(b, ordinal, fn));
                for (const auto& b : node.else_body)
                    out.else_body.push_back(transform_stmt_calls(b, ordinal, fn));
                return make_stmt(std::move(out));
            } else {
                static_assert(std::is_same_v<T, PrintStmt>);
                return make_stmt(PrintStmt{transform_expr_calls(node.value, ordinal, fn)});
            }
        },
        s->node);
}

struct SwapSite {
    std::size_t stmt_index = 0;
    int ordinal = 0;
    std::string name;
};

std::vector<SwapSite> collect_swap_sites(const Program& p) {
    std::vector<SwapSite> sites;
    for (std::size_t i = 0; i < p.statements.size(); ++i) {
        int ordinal = 0;
        transform_stmt_calls(p.statements[i], ordinal, [&](const Call& c, int idx) {
            sites.push_back(SwapSite{i, idx, c.name});
            return false;
        });
    }
    return sites;
}

// ---------------------------------------------------------------------------
// Name bookkeeping.

void collect_names_expr(const ExprPtr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, VarRef>) {
                out.insert(node.name);
            } else if constexpr (std::is_same_v<T, Unary>) {
                collect_names_expr(node.operand, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                collect_names_expr(node.lhs, out);
                collect_names_expr(node.rhs, out);
            } else if constexpr (std::is_same_v<T, Compare>) {
                collect_names_expr(node.lhs, out);
                collect_names_expr(node.rhs, out);
            } else if constexpr (std::is_same_v<T, Call>) {
                for (const auto& a : node.args) collect_names_expr(a, out);
            } else if constexpr (std::is_same_v<T, ListLit>) {
                for (const auto& it : node.items) collect_names_expr(it, out);
            }
        },
        e->node);
}

void collect_names_stmt(const StmtPtr& s, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, SymStmt>) {
                out.insert(node.names.begin(), node.names.end());
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
                out.insert(node.name);
                collect_names_expr(node.value, out);
            } else if constexpr (std::is_same_v<T, AssumeStmt>) {
                collect_names_expr(node.condition, out);
            } else if constexpr (std::is_same_v<T, ForStmt>) {
                out.insert(node.var);
                for (const auto& b : node.body) collect_names_stmt(b, out);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                collect_names_expr(node.condition, out);
                for (const auto& b : node.then_body) collect_names_stmt(b, out);
                for (const auto& b : node.else_body) collect_names_stmt(b, out);
            } else if constexpr (std::is_same_v<T, PrintStmt>) {
                collect_names_expr(node.value, out);
            }
        },
        s->node);
}

std::set<std::string> used_names(const Program& p) {
    std::set<std::string> out;
    for (const auto& s : p.statements) collect_names_stmt(s, out);
    return out;
}

std::vector<std::string> fresh_names(const Program& p, std::size_t want, Rng& rng) {
    static const std::vector<std::string> kPool = {
        "m",  "n",  "w",  "u",  "c2", "d2", "k2", "p2",
        "q2", "r2", "t2", "u2", "v2", "w2", "a2", "b2"};
    const std::set<std::string> used = used_names(p);
    std::vector<std::string> avail;
    for (const auto& n : kPool)
        if (!used.count(n) && !lang::is_reserved_word(n)) avail.push_back(n);
    if (avail.size() < want) return {};
    // Deterministic draw without replacement.
    std::vector<std::string> out;
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = rng.below(avail.size());
        out.push_back(avail[j]);
        avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constraint sites.

// Evaluates an expression that contains no variables or calls to a Rational.
std::optional<Rational> const_value(const ExprPtr& e) {
    return std::visit(
        [&](const auto& node) -> std::optional<Rational> {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NumberLit>) {
                return Rational(node.value);
            } else if constexpr (std::is_same_v<T, Unary>) {
                auto v = const_value(node.operand);
                if (!v) return std::nullopt;
                return Rational(0) - *v;
            } else if constexpr (std::is_same_v<T, Binary>) {
                auto l = const_value(node.lhs);
                auto r = const_value(node.rhs);
                if (!l || !r) return std::nullopt;
                switch (node.op) {
                    case '+': return *l + *r;
                    case '-': return *l - *r;
                    case '*': return *l * *r;
                    case '/': return r->is_zero() ? std::nullopt : std::optional(*l / *r);
                    default: return std::nullopt;
                }
            } else {
                return std::nullopt;
            }
        },
        e->node);
}

struct BoundSite {
    std::size_t stmt_index = 0;  // the assume statement
    std::string var;
    Rational pivot;
    bool is_lower = false;  // true when the existing assume bounds var from below
};

std::vector<BoundSite> collect_bound_sites(const Program& p) {
    std::vector<BoundSite> sites;
    for (std::size_t i = 0; i < p.statements.size(); ++i) {
        const auto* as = std::get_if<AssumeStmt>(&p.statements[i]->node);
        if (!as) continue;
        const auto* cmp = std::get_if<Compare>(&as->condition->node);
        if (!cmp || cmp->op == "==") continue;
        const auto* lv = std::get_if<VarRef>(&cmp->lhs->node);
        const auto* rv = std::get_if<VarRef>(&cmp->rhs->node);
        if (lv && !rv) {
            auto c = const_value(cmp->rhs);
            if (!c) continue;
            // x < c bounds from above; x > c from below.
            const bool lower = cmp->op == ">" || cmp->op == ">=";
            sites.push_back(BoundSite{i, lv->name, *c, lower});
        } else if (rv && !lv) {
            auto c = const_value(cmp->lhs);
            if (!c) continue;
            // c < x bounds from below; c > x from above.
            const bool lower = cmp->op == "<" || cmp->op == "<=";
            sites.push_back(BoundSite{i, rv->name, *c, lower});
        }
    }
    return sites;
}

struct UnboundedSolveVar {
    std::size_t stmt_index = 0;  // the solve-bearing assignment
    std::string var;
};

bool expr_contains_var(const ExprPtr& e, const std::string& name) {
    std::set<std::string> names;
    collect_names_expr(e, names);
    return names.count(name) != 0;
}

std::vector<UnboundedSolveVar> collect_unbounded_solve_vars(const Program& p) {
    std::vector<UnboundedSolveVar> sites;
    for (std::size_t i = 0; i < p.statements.size(); ++i) {
        const auto* assign = std::get_if<AssignStmt>(&p.statements[i]->node);
        if (!assign) continue;
        const auto* call = std::get_if<Call>(&assign->value->node);
        if (!call || call->name != "solve" || call->args.size() != 2) continue;
        const auto* vars = std::get_if<ListLit>(&call->args[1]->node);
        if (!vars) continue;
        for (const auto& v : vars->items) {
            const auto* vr = std::get_if<VarRef>(&v->node);
            if (!vr) continue;
            bool constrained = false;
            for (const auto& s : p.statements) {
                const auto* as = std::get_if<AssumeStmt>(&s->node);
                if (as && expr_contains_var(as->condition, vr->name)) {
                    constrained = true;
                    break;
                }
            }
            if (!constrained) sites.push_back(UnboundedSolveVar{i, vr->name});
        }
    }
    return sites;
}

// ---------------------------------------------------------------------------
// Raw (unvalidated) single-site rewrites.  Each returns the rewritten
// statement list plus a record; nullopt when no site exists.

struct Rewrite {
    std::vector<StmtPtr> statements;
    lang::MutationRecord record;
};

const std::vector<Rational>& ratio_grid() {
    // |r - 1| in [0.10, 3.00], denominators <= 12; checked by tests.
    static const std::vector<Rational> grid = {
        Rational(1, 10), Rational(1, 6), Rational(1, 4),  Rational(1, 3), Rational(1, 2),
        Rational(2, 3),  Rational(3, 4), Rational(4, 5),  Rational(9, 10),
        Rational(11, 10), Rational(6, 5), Rational(5, 4), Rational(4, 3), Rational(3, 2),
        Rational(5, 3),  Rational(2),    Rational(5, 2),  Rational(3),    Rational(7, 2),
        Rational(4)};
    return grid;
}

std::optional<Rewrite> apply_constant(const Program& p, Rng& rng) {
    const auto sites = collect_literal_sites(p, /*top_level_only=*/false);
    if (sites.empty()) return std::nullopt;
    const LiteralSite site = sites[rng.below(sites.size())];

    ExprPtr replacement;
    if (site.value == 0) {
        replacement = make_number(BigInt(rng.range(1, 5)));
    } else {
        const Rational ratio = ratio_grid()[rng.below(ratio_grid().size())];
        replacement = make_rational_literal(Rational(site.value) * ratio);
    }

    Rewrite rw;
    rw.statements = p.statements;
    std::string before, after;
    rw.statements[site.stmt_index] = replace_literal(p, site, replacement, before, after);
    std::ostringstream where;
    where << "stmt " << site.stmt_index << " lit " << site.ordinal;
    rw.record = lang::MutationRecord{"Constant", where.str(), before, after, 0};
    return rw;
}

std::optional<Rewrite> apply_variable(const Program& p, Rng& rng) {
    const auto sites = collect_literal_sites(p, /*top_level_only=*/true);
    if (sites.empty()) return std::nullopt;
    const LiteralSite site = sites[rng.below(sites.size())];
    const auto names = fresh_names(p, 1, rng);
    if (names.empty()) return std::nullopt;
    const std::string& name = names[0];

    Rewrite rw;
    rw.statements = p.statements;
    std::string before, after;
    StmtPtr rewritten = replace_literal(p, site, make_var(name), before, after);
    rw.statements[site.stmt_index] = rewritten;

    const auto at = rw.statements.begin() + static_cast<std::ptrdiff_t>(site.stmt_index);
    if (site.in_solve_eq) {
        // Symbolic parameter pinned by an assumed equality.
        rw.statements.insert(at, {make_stmt(SymStmt{{name}}),
                                  make_stmt(AssumeStmt{make_compare(
                                      "==", make_var(name), make_number(site.value))})});
    } else {
        rw.statements.insert(at,
                             make_stmt(AssignStmt{name, make_number(site.value)}));
    }
    std::ostringstream where;
    where << "stmt " << site.stmt_index << " lit " << site.ordinal;
    rw.record = lang::MutationRecord{"Variable", where.str(), before,
                                     name + " = " + before, 0};
    return rw;
}

std::optional<Rewrite> apply_constraint(const Program& p, Rng& rng) {
    const auto bounds = collect_bound_sites(p);
    const auto unbounded = collect_unbounded_solve_vars(p);
    const std::size_t total = bounds.size() + unbounded.size();
    if (total == 0) return std::nullopt;
    const std::size_t pick = rng.below(total);

    Rewrite rw;
    rw.statements = p.statements;
    if (pick < bounds.size()) {
        const BoundSite& site = bounds[pick];
        const long offset = rng.range(3, 9);
        StmtPtr added;
        if (site.is_lower) {
            // Existing lower bound: close the window from above.
            added = make_stmt(AssumeStmt{make_compare(
                "<", make_var(site.var),
                make_rational_literal(site.pivot + Rational(offset)))});
        } else {
            added = make_stmt(AssumeStmt{make_compare(
                ">", make_var(site.var),
                make_rational_literal(site.pivot - Rational(offset)))});
        }
        rw.statements.insert(rw.statements.begin() + static_cast<std::ptrdiff_t>(site.stmt_index) + 1,
                             added);
        std::ostringstream where;
        where << "after stmt " << site.stmt_index;
        rw.record = lang::MutationRecord{"Constraint", where.str(),
                                         lang::render_stmt(p.statements[site.stmt_index]),
                                         lang::render_stmt(added), 0};
    } else {
        const UnboundedSolveVar& site = unbounded[pick - bounds.size()];
        // A wide lower bound that documents the search range without
        // (usually) excluding the solutions of a toy-scale program.
        const long floor_mag = 50 + rng.range(0, 49);
        StmtPtr added = make_stmt(AssumeStmt{make_compare(
            ">", make_var(site.var), make_unary('-', make_number(BigInt(floor_mag))))});
        rw.statements.insert(rw.statements.begin() + static_cast<std::ptrdiff_t>(site.stmt_index),
                             added);
        std::ostringstream where;
        where << "before stmt " << site.stmt_index;
        rw.record = lang::MutationRecord{"Constraint", where.str(), "",
                                         lang::render_stmt(added), 0};
    }
    return rw;
}

std::optional<Rewrite> apply_code(const Program& p, Rng& rng) {
    enum SiteType { LoopInsert, IfWrap, Swap };
    const auto swaps = collect_swap_sites(p);
    std::vector<std::size_t> assigns;
    for (std::size_t i = 0; i < p.statements.size(); ++i)
        if (std::holds_alternative<AssignStmt>(p.statements[i]->node)) assigns.push_back(i);

    std::vector<std::pair<SiteType, std::size_t>> sites;
    sites.emplace_back(LoopInsert, 0);  // always one insertion point (before print)
    for (std::size_t i = 0; i < assigns.size(); ++i) sites.emplace_back(IfWrap, i);
    for (std::size_t i = 0; i < swaps.size(); ++i) sites.emplace_back(Swap, i);

    const auto [type, idx] = sites[rng.below(sites.size())];
    Rewrite rw;
    rw.statements = p.statements;

    if (type == LoopInsert) {
        const auto names = fresh_names(p, 2, rng);
        if (names.empty()) return std::nullopt;
        const std::string acc = names[0], iv = names[1];
        const long n = rng.range(3, 9);
        ForStmt loop;
        loop.var = iv;
        loop.from = 1;
        loop.to = n;
        loop.body.push_back(make_stmt(AssignStmt{
            acc, make_binary('+', make_var(acc), make_var(iv))}));
        const std::size_t at = p.statements.size() - 1;  // before the final print
        std::vector<StmtPtr> added = {make_stmt(AssignStmt{acc, make_number(BigInt(0))}),
                                      make_stmt(std::move(loop))};
        rw.statements.insert(rw.statements.begin() + static_cast<std::ptrdiff_t>(at),
                             added.begin(), added.end());
        std::ostringstream after_text;
        for (const auto& s : added) after_text << lang::render_stmt(s) << "\n";
        std::ostringstream where;
        where << "before stmt " << at;
        rw.record = lang::MutationRecord{"Code", where.str(), "", after_text.str(), 0};
    } else if (type == IfWrap) {
        const std::size_t si = assigns[idx];
        const auto& assign = std::get<AssignStmt>(p.statements[si]->node);
        const long c1 = rng.range(1, 5);
        const long c2 = c1 + rng.range(0, 4);
        IfStmt wrapped;
        wrapped.condition = make_compare("<=", make_number(BigInt(c1)), make_number(BigInt(c2)));
        wrapped.then_body.push_back(p.statements[si]);
        wrapped.else_body.push_back(make_stmt(AssignStmt{
            assign.name, make_binary('+', assign.value, make_number(BigInt(1)))}));
        StmtPtr added = make_stmt(std::move(wrapped));
        rw.statements[si] = added;
        std::ostringstream where;
        where << "stmt " << si;
        rw.record = lang::MutationRecord{"Code", where.str(),
                                         lang::render_stmt(p.statements[si]),
                                         lang::render_stmt(added), 0};
    } else {
        const SwapSite& site = swaps[idx];
        int ordinal = 0;
        rw.statements[site.stmt_index] = transform_stmt_calls(
            p.statements[site.stmt_index], ordinal,
            [&](const Call&, int i) { return i == site.ordinal; });
        std::ostringstream where;
        where << "stmt " << site.stmt_index << " call " << site.ordinal;
        rw.record = lang::MutationRecord{"Code", where.str(), site.name,
                                         swap_table().at(site.name), 0};
    }
    return rw;
}

std::optional<Rewrite> apply_kind(const Program& p, MutationKind kind, Rng& rng) {
    switch (kind) {
        case MutationKind::Constraint: return apply_constraint(p, rng);
        case MutationKind::Variable: return apply_variable(p, rng);
        case MutationKind::Constant: return apply_constant(p, rng);
        case MutationKind::Code: return apply_code(p, rng);
    }
    return std::nullopt;
}

}  // namespace

std::vector<MutationKind> applicable_kinds(const Program& p) {
    std::vector<MutationKind> kinds;
    if (!collect_bound_sites(p).empty() || !collect_unbounded_solve_vars(p).empty())
        kinds.push_back(MutationKind::Constraint);
    if (!collect_literal_sites(p, true).empty()) kinds.push_back(MutationKind::Variable);
    if (!collect_literal_sites(p, false).empty()) kinds.push_back(MutationKind::Constant);
    kinds.push_back(MutationKind::Code);  // loop insertion is always available
    return kinds;
}

std::optional<MutantCandidate> mutate_once(const Program& p, MutationKind kind, Rng& rng,
                                           const lang::Limits& limits, int iteration) {
    const lang::ExecutionResult parent = lang::execute(p, limits);
    if (parent.status != lang::ExecStatus::Ok) return std::nullopt;

    for (int attempt = 0; attempt < 5; ++attempt) {
        auto rw = apply_kind(p, kind, rng);
        if (!rw) return std::nullopt;  // no eligible site; retrying cannot help
        if (rw->record.before == rw->record.after) continue;

        Program candidate;
        candidate.statements = std::move(rw->statements);
        candidate.source = lang::render(candidate);
        lang::rehash(candidate);
        if (candidate.source_hash == p.source_hash) continue;

        // The canonical rendering must survive a parse round trip.
        try {
            (void)lang::parse(candidate.source);
        } catch (const lang::ParseError&) {
            continue;
        }
        const lang::ExecutionResult run = lang::execute(candidate, limits);
        if (run.status != lang::ExecStatus::Ok) continue;

        candidate.provenance = p.provenance;
        candidate.provenance.kind = lang::ProvenanceKind::Mutant;
        candidate.provenance.parent_hash = p.source_hash;
        candidate.mutation_trace = p.mutation_trace;
        rw->record.iteration = iteration;
        candidate.mutation_trace.push_back(rw->record);

        MutantCandidate out;
        out.program = std::move(candidate);
        out.parent_output = parent.canonical_text.value_or("");
        out.own_output = run.canonical_text.value_or("");
        return out;
    }
    return std::nullopt;
}

std::vector<MutantCandidate> mutate_iteratively(const Program& p, int k, Rng& rng,
                                                const lang::Limits& limits) {
    std::vector<MutantCandidate> out;
    Program survivor = p;
    for (int m = 1; m <= k; ++m) {
        std::vector<MutationKind> kinds = applicable_kinds(survivor);
        bool advanced = false;
        while (!kinds.empty()) {
            const std::size_t pick = rng.below(kinds.size());
            const MutationKind kind = kinds[pick];
            auto cand = mutate_once(survivor, kind, rng, limits, m);
            if (cand) {
                survivor = cand->program;
                out.push_back(std::move(*cand));
                advanced = true;
                break;
            }
            kinds.erase(kinds.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        if (!advanced) break;
    }
    return out;
}

synthesis::ProgramSet build_final_program_set(const synthesis::ProgramSet& originals,
                                              const std::vector<MutantCandidate>& mutants) {
    synthesis::ProgramSet out;
    for (const auto& p : originals.programs) out.insert(p);
    for (const auto& m : mutants) out.insert(m.program);
    return out;
}

namespace {

std::size_t count_statements(const std::vector<StmtPtr>& stmts) {
    std::size_t n = 0;
    for (const auto& s : stmts) {
        n += 1;
        if (const auto* f = std::get_if<ForStmt>(&s->node)) {
            n += count_statements(f->body);
        } else if (const auto* i = std::get_if<IfStmt>(&s->node)) {
            n += count_statements(i->then_body);
            n += count_statements(i->else_body);
        }
    }
    return n;
}

std::size_t count_assumes(const std::vector<StmtPtr>& stmts) {
    std::size_t n = 0;
    for (const auto& s : stmts) {
        if (std::holds_alternative<AssumeStmt>(s->node)) n += 1;
        if (const auto* f = std::get_if<ForStmt>(&s->node)) {
            n += count_assumes(f->body);
        } else if (const auto* i = std::get_if<IfStmt>(&s->node)) {
            n += count_assumes(i->then_body);
            n += count_assumes(i->else_body);
        }
    }
    return n;
}

}  // namespace

ComplexityScore complexity_score(const Program& p) {
    ComplexityScore score;
    score.nodes = lang::ast_node_count(p);
    score.statements = count_statements(p.statements);
    score.distinct_builtins = lang::collect_builtin_calls(p).size();
    score.constraint_count = count_assumes(p.statements);
    return score;
}

}  // namespace mathforge::mutation
