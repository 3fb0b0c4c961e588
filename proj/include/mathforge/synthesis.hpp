#pragma once

// Program synthesis: turns sampled topic combinations (or natural-language
// seed questions) into executable DSL programs.
//
// Template mode draws from a library of program skeletons, each tagged with
// the builtins it requires; a skeleton is eligible for a topic combination
// only when its requirements sit inside the combination's toolkit union, so
// every builtin call in an emitted program is justified by the combination
// (or is core arithmetic).  External mode asks the configured endpoint and
// keeps only completions that parse and execute cleanly.
//
// Invariant for every returned set: each program parses, executes with
// status Ok under the supplied limits, and carries provenance.

#include "mathforge/ast.hpp"
#include "mathforge/generator.hpp"
#include "mathforge/interpreter.hpp"
#include "mathforge/knowledge.hpp"
#include "mathforge/rng.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mathforge::synthesis {

struct SeedQuestion {
    std::string id;
    std::string text;
    std::string language = "en";
};

// JSONL, one object {"id","text","language"} per line ("language" optional).
std::vector<SeedQuestion> load_seed_questions(const std::string& path);

// Hash-deduplicated program collection, kept sorted by source_hash so that
// iteration order never depends on insertion order.
struct ProgramSet {
    std::vector<lang::Program> programs;
    std::map<std::string, std::size_t> source_counts;  // knowledge|seed|mutant

    // Returns false (and leaves the set unchanged) on a duplicate hash.
    bool insert(lang::Program p);
    bool contains(const std::string& source_hash) const;
    const lang::Program* find(const std::string& source_hash) const;
    std::size_t size() const { return programs.size(); }
};

struct Skeleton {
    std::string id;
    // Builtins the generated programs call; core arithmetic is always free.
    std::set<std::string> required_tools;
    std::function<lang::Program(Rng&)> build;
};

const std::vector<Skeleton>& skeleton_registry();

// Skeletons whose required_tools are a subset of `tools` (those needing no
// builtins are always eligible).
std::vector<const Skeleton*> eligible_skeletons(const std::set<std::string>& tools);

// Draws `count` topic combinations and builds one program per draw.  Item i
// uses an rng derived from (rng.seed(), i), so results are reproducible and
// independent of any parallel scheduling of the slots.  Duplicate programs
// are retried a few times, then the slot is skipped, so the result can hold
// fewer than `count` programs.
ProgramSet synthesize_from_knowledge(const knowledge::KnowledgeSystem& ks,
                                     const gen::GeneratorConfig& cfg,
                                     std::size_t count, Rng& rng,
                                     const lang::Limits& limits = {});

// One program attempt per seed; unmatched or failing seeds are skipped.
ProgramSet synthesize_from_seeds(const std::vector<SeedQuestion>& seeds,
                                 const gen::GeneratorConfig& cfg, Rng& rng,
                                 const lang::Limits& limits = {});

// Union of two sets: duplicates collapse onto the first occurrence and the
// per-source counts are recomputed from surviving programs.
ProgramSet merge_program_sets(const ProgramSet& a, const ProgramSet& b);

// Template-mode seed matcher.  Understands a small family of phrasings:
//   "Solve <lhs> = <rhs> for <var>."        (en)
//   "What is [the value of] <expr>?"        (en)
//   "Compute <expr>." / "Evaluate <expr>."  (en)
//   "计算 <expr>。" / "求 <expr> 的值。"      (zh)
// where <expr>/<lhs>/<rhs> are valid DSL expressions.  Returns nullopt when
// nothing matches or the resulting program fails to run.
std::optional<lang::Program> program_from_seed_template(const SeedQuestion& seed,
                                                        const lang::Limits& limits = {});

}  // namespace mathforge::synthesis
