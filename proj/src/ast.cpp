#include "mathforge/ast.hpp"

#include "mathforge/sha256.hpp"

#include <sstream>

namespace mathforge::lang {

ExprPtr make_number(BigInt v) { return std::make_shared<Expr>(Expr{NumberLit{std::move(v)}}); }
ExprPtr make_var(std::string name) { return std::make_shared<Expr>(Expr{VarRef{std::move(name)}}); }
ExprPtr make_unary(char op, ExprPtr operand) {
    return std::make_shared<Expr>(Expr{Unary{op, std::move(operand)}});
}
ExprPtr make_binary(char op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr make_compare(std::string op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<Expr>(Expr{Compare{std::move(op), std::move(lhs), std::move(rhs)}});
}
ExprPtr make_call(std::string name, std::vector<ExprPtr> args) {
    return std::make_shared<Expr>(Expr{Call{std::move(name), std::move(args)}});
}
ExprPtr make_list(std::vector<ExprPtr> items) {
    return std::make_shared<Expr>(Expr{ListLit{std::move(items)}});
}

ExprPtr make_rational_literal(const Rational& r) {
    ExprPtr mag;
    const BigInt num = boost::multiprecision::abs(r.num());
    if (r.is_integer()) mag = make_number(num);
    else mag = make_binary('/', make_number(num), make_number(r.den()));
    return r.is_negative() ? make_unary('-', mag) : mag;
}

StmtPtr make_stmt(SymStmt s) { return std::make_shared<Stmt>(Stmt{std::move(s)}); }
StmtPtr make_stmt(AssignStmt s) { return std::make_shared<Stmt>(Stmt{std::move(s)}); }
StmtPtr make_stmt(AssumeStmt s) { return std::make_shared<Stmt>(Stmt{std::move(s)}); }
StmtPtr make_stmt(ForStmt s) { return std::make_shared<Stmt>(Stmt{std::move(s)}); }
StmtPtr make_stmt(IfStmt s) { return std::make_shared<Stmt>(Stmt{std::move(s)}); }
StmtPtr make_stmt(PrintStmt s) { return std::make_shared<Stmt>(Stmt{std::move(s)}); }

namespace {

void collect_calls_expr(const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Unary>) {
                collect_calls_expr(x.operand, out);
            } else if constexpr (std::is_same_v<T, Binary> || std::is_same_v<T, Compare>) {
                collect_calls_expr(x.lhs, out);
                collect_calls_expr(x.rhs, out);
            } else if constexpr (std::is_same_v<T, Call>) {
                out.insert(x.name);
                for (const auto& a : x.args) collect_calls_expr(a, out);
            } else if constexpr (std::is_same_v<T, ListLit>) {
                for (const auto& i : x.items) collect_calls_expr(i, out);
            }
        },
        e->node);
}

void collect_calls_stmt(const StmtPtr& s, std::set<std::string>& out) {
    if (!s) return;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, AssignStmt> || std::is_same_v<T, PrintStmt>) {
                collect_calls_expr(x.value, out);
            } else if constexpr (std::is_same_v<T, AssumeStmt>) {
                collect_calls_expr(x.condition, out);
            } else if constexpr (std::is_same_v<T, ForStmt>) {
                for (const auto& b : x.body) collect_calls_stmt(b, out);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                collect_calls_expr(x.condition, out);
                for (const auto& b : x.then_body) collect_calls_stmt(b, out);
                for (const auto& b : x.else_body) collect_calls_stmt(b, out);
            }
        },
        s->node);
}

} // namespace

std::set<std::string> collect_builtin_calls(const Program& p) {
    std::set<std::string> out;
    for (const auto& s : p.statements) collect_calls_stmt(s, out);
    return out;
}

// ------------------------------------------------------------- equality

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, NumberLit>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return x.op == y.op && expr_equal(x.operand, y.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, Compare>) {
                return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, Call>) {
                if (x.name != y.name || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!expr_equal(x.args[i], y.args[i])) return false;
                return true;
            } else {
                if (x.items.size() != y.items.size()) return false;
                for (std::size_t i = 0; i < x.items.size(); ++i)
                    if (!expr_equal(x.items[i], y.items[i])) return false;
                return true;
            }
        },
        a->node);
}

namespace {

bool stmt_list_equal(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!stmt_equal(a[i], b[i])) return false;
    return true;
}

} // namespace

bool stmt_equal(const StmtPtr& a, const StmtPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, SymStmt>) {
                return x.names == y.names;
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
                return x.name == y.name && expr_equal(x.value, y.value);
            } else if constexpr (std::is_same_v<T, AssumeStmt>) {
                return expr_equal(x.condition, y.condition);
            } else if constexpr (std::is_same_v<T, ForStmt>) {
                return x.var == y.var && x.from == y.from && x.to == y.to &&
                       stmt_list_equal(x.body, y.body);
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                return expr_equal(x.condition, y.condition) &&
                       stmt_list_equal(x.then_body, y.then_body) &&
                       stmt_list_equal(x.else_body, y.else_body);
            } else {
                return expr_equal(x.value, y.value);
            }
        },
        a->node);
}

bool ast_equal(const Program& a, const Program& b) {
    return stmt_list_equal(a.statements, b.statements);
}

// ----------------------------------------------------------- node count

std::size_t expr_node_count(const ExprPtr& e) {
    if (!e) return 0;
    return std::visit(
        [](const auto& x) -> std::size_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, NumberLit> || std::is_same_v<T, VarRef>) {
                return 1;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return 1 + expr_node_count(x.operand);
            } else if constexpr (std::is_same_v<T, Binary> || std::is_same_v<T, Compare>) {
                return 1 + expr_node_count(x.lhs) + expr_node_count(x.rhs);
            } else if constexpr (std::is_same_v<T, Call>) {
                std::size_t n = 1;
                for (const auto& a : x.args) n += expr_node_count(a);
                return n;
            } else {
                std::size_t n = 1;
                for (const auto& i : x.items) n += expr_node_count(i);
                return n;
            }
        },
        e->node);
}

std::size_t stmt_node_count(const StmtPtr& s) {
    if (!s) return 0;
    return std::visit(
        [](const auto& x) -> std::size_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SymStmt>) {
                return 1 + x.names.size();
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
                return 1 + expr_node_count(x.value);
            } else if constexpr (std::is_same_v<T, AssumeStmt>) {
                return 1 + expr_node_count(x.condition);
            } else if constexpr (std::is_same_v<T, ForStmt>) {
                std::size_t n = 2;  // header + loop var
                for (const auto& b : x.body) n += stmt_node_count(b);
                return n;
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                std::size_t n = 1 + expr_node_count(x.condition);
                for (const auto& b : x.then_body) n += stmt_node_count(b);
                for (const auto& b : x.else_body) n += stmt_node_count(b);
                return n;
            } else {
                return 1 + expr_node_count(x.value);
            }
        },
        s->node);
}

std::size_t ast_node_count(const Program& p) {
    std::size_t n = 0;
    for (const auto& s : p.statements) n += stmt_node_count(s);
    return n;
}

// -------------------------------------------------------------- render

namespace {

// Precedence levels: compare 0, additive 1, multiplicative 2, unary minus 3,
// power 4, atoms 5. The power left operand must be an atom and its right
// operand at least a unary, mirroring the parser.
int precedence(const ExprPtr& e) {
    return std::visit(
        [](const auto& x) -> int {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Compare>) return 0;
            else if constexpr (std::is_same_v<T, Binary>)
                return x.op == '+' || x.op == '-' ? 1 : (x.op == '^' ? 4 : 2);
            else if constexpr (std::is_same_v<T, Unary>) return 3;
            else return 5;
        },
        e->node);
}

std::string wrap(const ExprPtr& e, int min_prec) {
    std::string s = render_expr(e);
    if (precedence(e) < min_prec) return "(" + s + ")";
    return s;
}

} // namespace

std::string render_expr(const ExprPtr& e) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, NumberLit>) {
                return x.value.str();
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return x.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return "-" + wrap(x.operand, 3);
            } else if constexpr (std::is_same_v<T, Binary>) {
                switch (x.op) {
                case '+': return wrap(x.lhs, 1) + " + " + wrap(x.rhs, 2);
                case '-': return wrap(x.lhs, 1) + " - " + wrap(x.rhs, 2);
                case '*': return wrap(x.lhs, 2) + "*" + wrap(x.rhs, 3);
                case '/': return wrap(x.lhs, 2) + "/" + wrap(x.rhs, 3);
                default: return wrap(x.lhs, 5) + "^" + wrap(x.rhs, 3);
                }
            } else if constexpr (std::is_same_v<T, Compare>) {
                return wrap(x.lhs, 1) + " " + x.op + " " + wrap(x.rhs, 1);
            } else if constexpr (std::is_same_v<T, Call>) {
                std::string s = x.name + "(";
                for (std::size_t i = 0; i < x.args.size(); ++i) {
                    if (i) s += ", ";
                    s += render_expr(x.args[i]);
                }
                return s + ")";
            } else {
                std::string s = "[";
                for (std::size_t i = 0; i < x.items.size(); ++i) {
                    if (i) s += ", ";
                    s += render_expr(x.items[i]);
                }
                return s + "]";
            }
        },
        e->node);
}

namespace {

void render_block(std::string& out, const std::vector<StmtPtr>& body, int indent) {
    for (const auto& s : body) {
        out += render_stmt(s, indent);
        out += "\n";
    }
}

} // namespace

std::string render_stmt(const StmtPtr& s, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, SymStmt>) {
                std::string out = pad + "sym";
                for (const auto& n : x.names) out += " " + n;
                return out + ";";
            } else if constexpr (std::is_same_v<T, AssignStmt>) {
                return pad + x.name + " = " + render_expr(x.value) + ";";
            } else if constexpr (std::is_same_v<T, AssumeStmt>) {
                return pad + "assume " + render_expr(x.condition) + ";";
            } else if constexpr (std::is_same_v<T, ForStmt>) {
                std::string out = pad + "for " + x.var + " in " + std::to_string(x.from) + ".." +
                                  std::to_string(x.to) + " {\n";
                render_block(out, x.body, indent + 1);
                return out + pad + "}";
            } else if constexpr (std::is_same_v<T, IfStmt>) {
                std::string out = pad + "if " + render_expr(x.condition) + " {\n";
                render_block(out, x.then_body, indent + 1);
                out += pad + "}";
                if (!x.else_body.empty()) {
                    out += " else {\n";
                    render_block(out, x.else_body, indent + 1);
                    out += pad + "}";
                }
                return out;
            } else {
                return pad + "print(" + render_expr(x.value) + ");";
            }
        },
        s->node);
}

std::string render(const Program& p) {
    std::string out;
    for (const auto& s : p.statements) {
        out += render_stmt(s, 0);
        out += "\n";
    }
    return out;
}

void rehash(Program& p) { p.source_hash = Sha256::hex_digest(render(p)); }

} // namespace mathforge::lang
