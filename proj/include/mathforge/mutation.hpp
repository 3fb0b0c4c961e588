#pragma once

// Difficulty evolution: small, recorded rewrites of existing programs.
//
// Four operator kinds, each editing exactly one site per application:
//   * Constraint - adds a complementary inequality next to an existing bound,
//     or a wide lower bound on a solved-for variable that has none.
//   * Variable   - promotes a numeric literal to a named variable (sym +
//     assume == inside solve equations, a plain binding elsewhere).
//   * Constant   - perturbs a numeric literal by a rational ratio r with
//     |r - 1| in [0.10, 3.00] and denominator <= 12; a zero literal is
//     shifted by an integer in [1, 5].  Loop bounds and exponent positions
//     are never eligible.
//   * Code       - inserts a self-contained accumulation loop, wraps an
//     assignment in an if/else whose condition is constantly true, or swaps
//     a builtin for its equal-arity partner (min<->max, gcd<->lcm,
//     expand<->simplify, abs<->floor).
//
// Every mutant is re-executed before being accepted; a mutation attempt that
// fails to run with status Ok is discarded and redrawn (up to 5 attempts).

#include "mathforge/ast.hpp"
#include "mathforge/interpreter.hpp"
#include "mathforge/rng.hpp"
#include "mathforge/synthesis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mathforge::mutation {

enum class MutationKind { Constraint, Variable, Constant, Code };

std::string mutation_kind_name(MutationKind k);

struct MutantCandidate {
    lang::Program program;       // provenance Mutant, trace extended
    std::string parent_output;   // canonical output text of the parent
    std::string own_output;      // canonical output text of the mutant
};

// Kinds that have at least one eligible site in p.
std::vector<MutationKind> applicable_kinds(const lang::Program& p);

// One validated mutation of the given kind, or nullopt after 5 failed
// attempts (no eligible site, or every attempt failed to execute Ok).
// `iteration` is stamped into the appended MutationRecord.
std::optional<MutantCandidate> mutate_once(const lang::Program& p, MutationKind kind,
                                           Rng& rng, const lang::Limits& limits = {},
                                           int iteration = 1);

// Survivor chain: iteration m mutates the survivor of iteration m-1 with a
// uniformly drawn applicable kind (redrawing among the other applicable
// kinds when an attempt fails; stopping early when none succeed).  Returns
// every surviving intermediate, so the result holds at most k programs and
// the program at position m-1 carries m mutation records.
std::vector<MutantCandidate> mutate_iteratively(const lang::Program& p, int k, Rng& rng,
                                                const lang::Limits& limits = {});

// Originals plus mutants, deduplicated by source hash.
synthesis::ProgramSet build_final_program_set(const synthesis::ProgramSet& originals,
                                              const std::vector<MutantCandidate>& mutants);

struct ComplexityScore {
    std::size_t nodes = 0;              // AST nodes
    std::size_t statements = 0;         // statements, including nested ones
    std::size_t distinct_builtins = 0;  // unique builtin names called
    std::size_t constraint_count = 0;   // assume statements
};

bool operator==(const ComplexityScore& a, const ComplexityScore& b);

ComplexityScore complexity_score(const lang::Program& p);

}  // namespace mathforge::mutation
