#pragma once

#include "mathforge/ast.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace mathforge::lang {

enum class ParseErrorKind {
    Syntax,
    UnknownBuiltin,
    MissingFinalPrint,
    ReservedName,
    BoundTooLarge,
    BadArity,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, int line, int column, const std::string& message);
    ParseErrorKind kind() const { return kind_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    ParseErrorKind kind_;
    int line_;
    int column_;
};

// Name -> arity for every DSL builtin; calling anything else is a parse error.
const std::map<std::string, int>& builtin_arities();
bool is_builtin(const std::string& name);
bool is_reserved_word(const std::string& name);

// Maximum iteration count of a single for loop (inclusive bounds).
inline constexpr long kMaxLoopSpan = 10000;

Program parse(const std::string& source);

} // namespace mathforge::lang
