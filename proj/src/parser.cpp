#include "mathforge/parser.hpp"

#include "mathforge/sha256.hpp"

#include <array>
#include <cctype>

namespace mathforge::lang {

ParseError::ParseError(ParseErrorKind kind, int line, int column, const std::string& message)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

const std::map<std::string, int>& builtin_arities() {
    static const std::map<std::string, int> table = {
        {"solve", 2}, {"subst", 3}, {"expand", 1}, {"simplify", 1},
        {"gcd", 2},   {"lcm", 2},   {"abs", 1},    {"sqrt", 1},
        {"pow", 2},   {"sum", 4},   {"deriv", 2},  {"evalf", 1},
        {"min", 2},   {"max", 2},   {"floor", 1},  {"mod", 2},
    };
    return table;
}

bool is_builtin(const std::string& name) { return builtin_arities().count(name) > 0; }

bool is_reserved_word(const std::string& name) {
    static const std::array<const char*, 7> keywords = {"sym", "assume", "for", "in",
                                                        "if",  "else",   "print"};
    for (const char* k : keywords)
        if (name == k) return true;
    return is_builtin(name);
}

namespace {

enum class Tok {
    End, Ident, Number, Keyword,
    Semi, Assign, LParen, RParen, LBracket, RBracket, LBrace, RBrace,
    Comma, Plus, Minus, Star, Slash, Caret, DotDot,
    Eq, Lt, Le, Gt, Ge,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token next() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_trivia();
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= src_.size()) {
            current_.kind = Tok::End;
            current_.text.clear();
            return;
        }
        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                take();
            current_.text = src_.substr(start, pos_ - start);
            static const std::array<const char*, 7> keywords = {"sym", "assume", "for", "in",
                                                                "if",  "else",   "print"};
            current_.kind = Tok::Ident;
            for (const char* k : keywords)
                if (current_.text == k) current_.kind = Tok::Keyword;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                take();
            current_.text = src_.substr(start, pos_ - start);
            current_.kind = Tok::Number;
            return;
        }
        take();
        switch (c) {
        case ';': current_.kind = Tok::Semi; return;
        case '(': current_.kind = Tok::LParen; return;
        case ')': current_.kind = Tok::RParen; return;
        case '[': current_.kind = Tok::LBracket; return;
        case ']': current_.kind = Tok::RBracket; return;
        case '{': current_.kind = Tok::LBrace; return;
        case '}': current_.kind = Tok::RBrace; return;
        case ',': current_.kind = Tok::Comma; return;
        case '+': current_.kind = Tok::Plus; return;
        case '-': current_.kind = Tok::Minus; return;
        case '*': current_.kind = Tok::Star; return;
        case '/': current_.kind = Tok::Slash; return;
        case '^': current_.kind = Tok::Caret; return;
        case '.':
            if (pos_ < src_.size() && src_[pos_] == '.') {
                take();
                current_.kind = Tok::DotDot;
                return;
            }
            fail("unexpected '.'");
        case '=':
            if (pos_ < src_.size() && src_[pos_] == '=') {
                take();
                current_.kind = Tok::Eq;
            } else {
                current_.kind = Tok::Assign;
            }
            return;
        case '<':
            if (pos_ < src_.size() && src_[pos_] == '=') {
                take();
                current_.kind = Tok::Le;
            } else {
                current_.kind = Tok::Lt;
            }
            return;
        case '>':
            if (pos_ < src_.size() && src_[pos_] == '=') {
                take();
                current_.kind = Tok::Ge;
            } else {
                current_.kind = Tok::Gt;
            }
            return;
        default: fail(std::string("unexpected character '") + c + "'");
        }
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') take();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else {
                break;
            }
        }
    }

    void take() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ParseErrorKind::Syntax, line_, column_, msg);
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    Token current_;
};

class Parser {
public:
    explicit Parser(Lexer& l) : lex(&l) {}

    Program parse_program(const std::string& source) {
        std::vector<StmtPtr> stmts;
        bool saw_print = false;
        while (lex->peek().kind != Tok::End) {
            if (saw_print)
                fail(ParseErrorKind::Syntax, lex->peek(), "no statements may follow the final print");
            StmtPtr s = parse_statement(/*allow_print=*/true);
            saw_print = std::holds_alternative<PrintStmt>(s->node);
            stmts.push_back(std::move(s));
        }
        if (stmts.empty() || !saw_print) {
            const Token& t = lex->peek();
            throw ParseError(ParseErrorKind::MissingFinalPrint, t.line, t.column,
                             "program must end with a print statement");
        }
        Program p;
        p.statements = std::move(stmts);
        p.source = source;
        rehash(p);
        return p;
    }

private:
    StmtPtr parse_statement(bool allow_print) {
        const Token& t = lex->peek();
        if (t.kind == Tok::Keyword) {
            if (t.text == "sym") return parse_sym();
            if (t.text == "assume") return parse_assume();
            if (t.text == "for") return parse_for();
            if (t.text == "if") return parse_if();
            if (t.text == "print") {
                if (!allow_print)
                    fail(ParseErrorKind::Syntax, t, "print is only allowed as the final statement");
                return parse_print();
            }
            fail(ParseErrorKind::Syntax, t, "unexpected keyword '" + t.text + "'");
        }
        if (t.kind == Tok::Ident) return parse_assign();
        fail(ParseErrorKind::Syntax, t, "expected a statement");
    }

    StmtPtr parse_sym() {
        lex->next();  // sym
        SymStmt s;
        while (lex->peek().kind == Tok::Ident) {
            Token name = lex->next();
            check_name(name);
            s.names.push_back(name.text);
        }
        if (s.names.empty()) fail(ParseErrorKind::Syntax, lex->peek(), "sym needs at least one name");
        expect(Tok::Semi, "';'");
        return make_stmt(std::move(s));
    }

    StmtPtr parse_assign() {
        Token name = lex->next();
        check_name(name);
        expect(Tok::Assign, "'='");
        ExprPtr value = parse_expr();
        expect(Tok::Semi, "';'");
        return make_stmt(AssignStmt{name.text, std::move(value)});
    }

    StmtPtr parse_assume() {
        lex->next();  // assume
        Token at = lex->peek();
        ExprPtr rel = parse_expr();
        if (!std::holds_alternative<Compare>(rel->node))
            fail(ParseErrorKind::Syntax, at, "assume requires a relation");
        expect(Tok::Semi, "';'");
        return make_stmt(AssumeStmt{std::move(rel)});
    }

    StmtPtr parse_for() {
        Token kw = lex->next();  // for
        Token var = expect(Tok::Ident, "loop variable");
        check_name(var);
        expect_keyword("in");
        const long from = parse_bound();
        expect(Tok::DotDot, "'..'");
        const long to = parse_bound();
        if (to >= from && to - from > kMaxLoopSpan)
            throw ParseError(ParseErrorKind::BoundTooLarge, kw.line, kw.column,
                             "loop spans more than " + std::to_string(kMaxLoopSpan) + " iterations");
        ForStmt s;
        s.var = var.text;
        s.from = from;
        s.to = to;
        s.body = parse_block();
        return make_stmt(std::move(s));
    }

    StmtPtr parse_if() {
        lex->next();  // if
        Token at = lex->peek();
        ExprPtr cond = parse_expr();
        if (!std::holds_alternative<Compare>(cond->node))
            fail(ParseErrorKind::Syntax, at, "if requires a relation");
        IfStmt s;
        s.condition = std::move(cond);
        s.then_body = parse_block();
        if (lex->peek().kind == Tok::Keyword && lex->peek().text == "else") {
            lex->next();
            s.else_body = parse_block();
        }
        return make_stmt(std::move(s));
    }

    StmtPtr parse_print() {
        lex->next();  // print
        expect(Tok::LParen, "'('");
        ExprPtr value = parse_expr();
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return make_stmt(PrintStmt{std::move(value)});
    }

    std::vector<StmtPtr> parse_block() {
        expect(Tok::LBrace, "'{'");
        std::vector<StmtPtr> body;
        while (lex->peek().kind != Tok::RBrace) {
            if (lex->peek().kind == Tok::End)
                fail(ParseErrorKind::Syntax, lex->peek(), "unterminated block");
            body.push_back(parse_statement(/*allow_print=*/false));
        }
        lex->next();  // }
        return body;
    }

    long parse_bound() {
        bool neg = false;
        if (lex->peek().kind == Tok::Minus) {
            lex->next();
            neg = true;
        }
        Token num = expect(Tok::Number, "integer bound");
        if (num.text.size() > 15)
            throw ParseError(ParseErrorKind::BoundTooLarge, num.line, num.column,
                             "loop bound too large");
        long v = std::stol(num.text);
        return neg ? -v : v;
    }

    // expr := add [cmp-op add]
    ExprPtr parse_expr() {
        ExprPtr lhs = parse_add();
        const Tok k = lex->peek().kind;
        std::string op;
        if (k == Tok::Eq) op = "==";
        else if (k == Tok::Lt) op = "<";
        else if (k == Tok::Le) op = "<=";
        else if (k == Tok::Gt) op = ">";
        else if (k == Tok::Ge) op = ">=";
        else return lhs;
        lex->next();
        ExprPtr rhs = parse_add();
        return make_compare(std::move(op), std::move(lhs), std::move(rhs));
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        while (true) {
            const Tok k = lex->peek().kind;
            if (k != Tok::Plus && k != Tok::Minus) return lhs;
            lex->next();
            ExprPtr rhs = parse_mul();
            lhs = make_binary(k == Tok::Plus ? '+' : '-', std::move(lhs), std::move(rhs));
        }
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        while (true) {
            const Tok k = lex->peek().kind;
            if (k != Tok::Star && k != Tok::Slash) return lhs;
            lex->next();
            ExprPtr rhs = parse_unary();
            lhs = make_binary(k == Tok::Star ? '*' : '/', std::move(lhs), std::move(rhs));
        }
    }

    ExprPtr parse_unary() {
        if (lex->peek().kind == Tok::Minus) {
            lex->next();
            return make_unary('-', parse_unary());
        }
        return parse_pow();
    }

    ExprPtr parse_pow() {
        ExprPtr base = parse_atom();
        if (lex->peek().kind == Tok::Caret) {
            lex->next();
            ExprPtr exp = parse_unary();  // right-associative
            return make_binary('^', std::move(base), std::move(exp));
        }
        return base;
    }

    ExprPtr parse_atom() {
        const Token t = lex->peek();
        switch (t.kind) {
        case Tok::Number: {
            lex->next();
            // Digit-by-digit accumulation: cpp_int's string constructor would
            // read a leading zero as an octal prefix.
            BigInt v = 0;
            for (const char c : t.text) v = v * 10 + (c - '0');
            return make_number(v);
        }
        case Tok::Ident: {
            lex->next();
            if (lex->peek().kind == Tok::LParen) return parse_call(t);
            if (is_builtin(t.text))
                fail(ParseErrorKind::ReservedName, t,
                     "'" + t.text + "' is a builtin and cannot be used as a variable");
            return make_var(t.text);
        }
        case Tok::LParen: {
            lex->next();
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::LBracket: {
            lex->next();
            std::vector<ExprPtr> items;
            if (lex->peek().kind != Tok::RBracket) {
                items.push_back(parse_expr());
                while (lex->peek().kind == Tok::Comma) {
                    lex->next();
                    items.push_back(parse_expr());
                }
            }
            expect(Tok::RBracket, "']'");
            return make_list(std::move(items));
        }
        default: fail(ParseErrorKind::Syntax, t, "expected an expression");
        }
    }

    ExprPtr parse_call(const Token& name) {
        const auto& table = builtin_arities();
        const auto it = table.find(name.text);
        if (it == table.end())
            throw ParseError(ParseErrorKind::UnknownBuiltin, name.line, name.column,
                             "unknown builtin '" + name.text + "'");
        expect(Tok::LParen, "'('");
        std::vector<ExprPtr> args;
        if (lex->peek().kind != Tok::RParen) {
            args.push_back(parse_expr());
            while (lex->peek().kind == Tok::Comma) {
                lex->next();
                args.push_back(parse_expr());
            }
        }
        expect(Tok::RParen, "')'");
        if (static_cast<int>(args.size()) != it->second)
            throw ParseError(ParseErrorKind::BadArity, name.line, name.column,
                             "'" + name.text + "' takes " + std::to_string(it->second) +
                                 " argument(s), got " + std::to_string(args.size()));
        return make_call(name.text, std::move(args));
    }

    Token expect(Tok kind, const std::string& what) {
        if (lex->peek().kind != kind) fail(ParseErrorKind::Syntax, lex->peek(), "expected " + what);
        return lex->next();
    }

    void expect_keyword(const std::string& kw) {
        const Token& t = lex->peek();
        if (t.kind != Tok::Keyword || t.text != kw)
            fail(ParseErrorKind::Syntax, t, "expected '" + kw + "'");
        lex->next();
    }

    void check_name(const Token& name) {
        if (is_reserved_word(name.text))
            throw ParseError(ParseErrorKind::ReservedName, name.line, name.column,
                             "'" + name.text + "' is reserved");
    }

    Lexer* lex;

    [[noreturn]] void fail(ParseErrorKind kind, const Token& t, const std::string& msg) {
        throw ParseError(kind, t.line, t.column, msg);
    }
};

} // namespace

Program parse(const std::string& source) {
    Lexer lex(source);
    Parser parser(lex);
    return parser.parse_program(source);
}

} // namespace mathforge::lang
