#pragma once

#include "mathforge/value.hpp"

#include <map>
#include <string>
#include <vector>

namespace mathforge::lang {

// poly `op` 0, with op one of == < <= > >=.
struct PolyConstraint {
    std::string op;
    Polynomial poly;
};

// Solves { p = 0 : p in equations } for `targets`, then filters alternatives
// against the inequality constraints. Supports arbitrary linear systems over
// the rationals and systems reducible (after linear elimination) to a single
// univariate quadratic. Throws ValueError on anything else, on underdetermined
// targets and on undecidable constraints. Inconsistent systems and quadratics
// with negative discriminant yield an empty set.
SolutionSet solve_system(std::vector<Polynomial> equations,
                         const std::vector<std::string>& targets,
                         const std::vector<PolyConstraint>& inequalities);

// Evaluates p with every variable bound; throws ValueError when a variable
// is missing from the bindings.
Value poly_eval(const Polynomial& p, const std::map<std::string, Value>& bindings);

} // namespace mathforge::lang
