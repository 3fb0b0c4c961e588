#pragma once

#include "mathforge/rational.hpp"

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace mathforge::lang {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Non-negative integer literal; negatives are a Unary node, non-integer
// rationals a Binary '/' node, so canonical rendering round-trips exactly.
struct NumberLit {
    BigInt value;
};

struct VarRef {
    std::string name;
};

struct Unary {
    char op;  // '-'
    ExprPtr operand;
};

struct Binary {
    char op;  // + - * / ^
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Compare {
    std::string op;  // == < <= > >=
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Call {
    std::string name;
    std::vector<ExprPtr> args;
};

struct ListLit {
    std::vector<ExprPtr> items;
};

struct Expr {
    std::variant<NumberLit, VarRef, Unary, Binary, Compare, Call, ListLit> node;
};

ExprPtr make_number(BigInt v);
ExprPtr make_var(std::string name);
ExprPtr make_unary(char op, ExprPtr operand);
ExprPtr make_binary(char op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_compare(std::string op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(std::string name, std::vector<ExprPtr> args);
ExprPtr make_list(std::vector<ExprPtr> items);
// Integer or p/q literal expression (negatives wrapped in unary minus).
ExprPtr make_rational_literal(const Rational& r);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct SymStmt {
    std::vector<std::string> names;
};

struct AssignStmt {
    std::string name;
    ExprPtr value;
};

struct AssumeStmt {
    ExprPtr condition;  // always a Compare node
};

struct ForStmt {
    std::string var;
    long from = 0;  // literal bounds, checked at parse time
    long to = 0;
    std::vector<StmtPtr> body;
};

struct IfStmt {
    ExprPtr condition;  // always a Compare node
    std::vector<StmtPtr> then_body;
    std::vector<StmtPtr> else_body;
};

struct PrintStmt {
    ExprPtr value;
};

struct Stmt {
    std::variant<SymStmt, AssignStmt, AssumeStmt, ForStmt, IfStmt, PrintStmt> node;
};

StmtPtr make_stmt(SymStmt s);
StmtPtr make_stmt(AssignStmt s);
StmtPtr make_stmt(AssumeStmt s);
StmtPtr make_stmt(ForStmt s);
StmtPtr make_stmt(IfStmt s);
StmtPtr make_stmt(PrintStmt s);

enum class ProvenanceKind { Knowledge, Seed, Mutant };

struct Provenance {
    ProvenanceKind kind = ProvenanceKind::Knowledge;
    std::vector<std::string> topic_ids;  // Knowledge
    std::string seed_id;                 // Seed
    std::string parent_hash;             // Mutant
};

struct MutationRecord {
    std::string kind;  // Constraint | Variable | Constant | Code
    std::string site;  // statement index + node path, human-readable
    std::string before;
    std::string after;
    int iteration = 0;
};

struct Program {
    std::vector<StmtPtr> statements;
    std::string source;       // text the program was parsed from
    std::string source_hash;  // SHA-256 of the canonical rendering
    Provenance provenance;
    std::vector<MutationRecord> mutation_trace;
};

// All builtin names called anywhere in the program (syntax pattern mining).
std::set<std::string> collect_builtin_calls(const Program& p);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);
bool stmt_equal(const StmtPtr& a, const StmtPtr& b);
bool ast_equal(const Program& a, const Program& b);

std::size_t expr_node_count(const ExprPtr& e);
std::size_t stmt_node_count(const StmtPtr& s);
std::size_t ast_node_count(const Program& p);

// Canonical pretty-print: normalized whitespace, minimal parentheses,
// 4-space block indent. parse(render(p)) is structurally identical to p.
std::string render(const Program& p);
std::string render_expr(const ExprPtr& e);
std::string render_stmt(const StmtPtr& s, int indent = 0);

// Recompute source_hash from the canonical rendering.
void rehash(Program& p);

} // namespace mathforge::lang
