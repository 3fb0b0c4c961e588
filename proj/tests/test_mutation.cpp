#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mathforge/interpreter.hpp"
#include "mathforge/mutation.hpp"
#include "mathforge/parser.hpp"

#include <algorithm>
#include <set>

using namespace mathforge;
using namespace mathforge::mutation;

namespace {

lang::Program knowledge_program(const std::string& src) {
    lang::Program p = lang::parse(src);
    p.provenance.kind = lang::ProvenanceKind::Knowledge;
    p.provenance.topic_ids = {"topic-a", "topic-b"};
    return p;
}

// Evaluates a rendered literal expression ("5", "-3/2", ...) to a rational.
lang::Rational eval_literal(const std::string& text) {
    const auto r = lang::run_source("print(" + text + ");\n");
    REQUIRE(r.status == lang::ExecStatus::Ok);
    return lang::numeric_to_rational(*r.output);
}

} // namespace

TEST_CASE("constant mutation: grid factor bounds and zero handling") {
    const lang::Program parent = knowledge_program("x = 12;\nprint(x + 30);\n");
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Rng rng(seed);
        const auto m = mutate_once(parent, MutationKind::Constant, rng);
        REQUIRE(m.has_value());
        REQUIRE(m->program.mutation_trace.size() == 1);
        const lang::MutationRecord& rec = m->program.mutation_trace.back();
        CHECK(rec.kind == "Constant");
        CHECK(rec.iteration == 1);
        CHECK(rec.before != rec.after);

        const lang::Rational before = eval_literal(rec.before);
        const lang::Rational after = eval_literal(rec.after);
        REQUIRE(before.num() != 0);  // this parent has no zero literals
        const lang::Rational ratio = after / before;
        // Deviation |r - 1| within [1/10, 3]: the mutated constant moves by
        // at least 10% and at most 300% of its old magnitude.
        const lang::Rational dev = (ratio - lang::Rational(1)).abs();
        CHECK(dev >= lang::Rational(1, 10));
        CHECK(dev <= lang::Rational(3));
        ++checked;
    }
    CHECK(checked == 60);

    SUBCASE("a zero literal is replaced by a small positive integer") {
        const lang::Program zero_parent = knowledge_program("x = 0;\nprint(x + 7);\n");
        std::set<std::string> afters;
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            Rng rng(seed);
            const auto m = mutate_once(zero_parent, MutationKind::Constant, rng);
            REQUIRE(m.has_value());
            const auto& rec = m->program.mutation_trace.back();
            if (rec.before != "0") continue;  // the other literal was drawn
            const lang::Rational v = eval_literal(rec.after);
            CHECK(v >= lang::Rational(1));
            CHECK(v <= lang::Rational(5));
            CHECK(v.den() == 1);
            afters.insert(rec.after);
        }
        CHECK(!afters.empty());
    }
}

TEST_CASE("constant mutation never touches exponents or structural positions") {
    // The only literals here sit in excluded spots: '^' right side, pow's
    // second argument, sum bounds, and for-loop bounds; plus one eligible
    // literal (the 3 inside the sum body) that mutations may hit.
    const lang::Program parent = knowledge_program(
        "a = sum(i, 1, 4, i^2);\n"
        "b = pow(2, 3);\n"
        "print(a + b);\n");
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        const auto m = mutate_once(parent, MutationKind::Constant, rng);
        if (!m) continue;
        const auto& rec = m->program.mutation_trace.back();
        // Only pow's base (2) is eligible: sum header literals and the
        // exponent argument must stay fixed.
        CHECK(eval_literal(rec.before) == lang::Rational(2));
        const std::string out = lang::render(m->program);
        CHECK(out.find("sum(i, 1, 4, i^2)") != std::string::npos);
        CHECK(out.find("pow(") != std::string::npos);
        CHECK(out.find(", 3)") != std::string::npos);
    }
}

TEST_CASE("variable mutation extracts a literal into a named binding") {
    const lang::Program parent = knowledge_program("print(41 + 1);\n");
    Rng rng(5);
    const auto m = mutate_once(parent, MutationKind::Variable, rng);
    REQUIRE(m.has_value());
    const auto& rec = m->program.mutation_trace.back();
    CHECK(rec.kind == "Variable");
    // The mutant gains an assignment and still prints the same value.
    CHECK(m->program.statements.size() == parent.statements.size() + 1);
    CHECK(m->own_output == m->parent_output);

    SUBCASE("inside a solve equation the binding becomes sym + assume") {
        const lang::Program solver =
            knowledge_program("sym x;\ns = solve([x + 2 == 5], [x]);\nprint(s);\n");
        bool saw_assume_binding = false;
        for (std::uint64_t seed = 0; seed < 30 && !saw_assume_binding; ++seed) {
            Rng r(seed);
            const auto v = mutate_once(solver, MutationKind::Variable, r);
            if (!v) continue;
            const std::string out = lang::render(v->program);
            saw_assume_binding = out.find("assume") != std::string::npos &&
                                 lang::execute(v->program).status == lang::ExecStatus::Ok &&
                                 v->own_output == "{x: 3}";
        }
        CHECK(saw_assume_binding);
    }
}

TEST_CASE("constraint mutation tightens a one-sided assumption (0 < x pattern)") {
    const lang::Program parent = knowledge_program(
        "sym x;\n"
        "assume 0 < x;\n"
        "s = solve([x*x == 4], [x]);\n"
        "print(s);\n");
    REQUIRE(*lang::execute(parent).canonical_text == "{x: 2}");

    bool added_upper_bound = false;
    for (std::uint64_t seed = 0; seed < 30 && !added_upper_bound; ++seed) {
        Rng rng(seed);
        const auto m = mutate_once(parent, MutationKind::Constraint, rng);
        if (!m) continue;
        CHECK(m->program.mutation_trace.back().kind == "Constraint");
        const std::string out = lang::render(m->program);
        // "0 < x" grows a counterpart "x < <bound>" while keeping the result.
        added_upper_bound = out.find("assume x <") != std::string::npos;
        CHECK(lang::execute(m->program).status == lang::ExecStatus::Ok);
    }
    CHECK(added_upper_bound);
}

TEST_CASE("code mutation grows the statement count and keeps programs runnable") {
    const lang::Program parent = knowledge_program("y = 6;\nprint(y * 7);\n");
    std::set<std::string> sites;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const auto m = mutate_once(parent, MutationKind::Code, rng);
        REQUIRE(m.has_value());
        CHECK(lang::execute(m->program).status == lang::ExecStatus::Ok);
        const auto score_parent = complexity_score(parent);
        const auto score_mutant = complexity_score(m->program);
        CHECK(score_mutant.nodes > score_parent.nodes);
        sites.insert(m->program.mutation_trace.back().site);
    }
    CHECK(sites.size() > 1);  // both loop insertion and if-wrapping occur

    SUBCASE("builtin swap rewrites min/max gcd/lcm pairs") {
        const lang::Program swappable = knowledge_program("print(min(3, 8));\n");
        bool saw_swap = false;
        for (std::uint64_t seed = 0; seed < 40 && !saw_swap; ++seed) {
            Rng rng(seed);
            const auto m = mutate_once(swappable, MutationKind::Code, rng);
            if (!m) continue;
            if (lang::render(m->program).find("max(3, 8)") != std::string::npos) {
                saw_swap = true;
                CHECK(m->own_output == "8");
            }
        }
        CHECK(saw_swap);
    }
}

TEST_CASE("mutate_once contracts: provenance, trace, validation") {
    const lang::Program parent = knowledge_program("x = 9;\nprint(x * x);\n");
    Rng rng(11);
    const auto m = mutate_once(parent, MutationKind::Constant, rng, {}, /*iteration=*/4);
    REQUIRE(m.has_value());
    CHECK(m->program.provenance.kind == lang::ProvenanceKind::Mutant);
    CHECK(m->program.provenance.parent_hash == parent.source_hash);
    CHECK(m->program.provenance.topic_ids == parent.provenance.topic_ids);
    CHECK(m->program.source_hash != parent.source_hash);
    CHECK(m->program.mutation_trace.back().iteration == 4);
    CHECK(m->parent_output == *lang::execute(parent).canonical_text);
    CHECK(m->own_output == *lang::execute(m->program).canonical_text);

    SUBCASE("a parent that cannot execute is never mutated") {
        lang::Program broken = lang::parse("print(1/0);\n");
        Rng r(1);
        CHECK(!mutate_once(broken, MutationKind::Constant, r).has_value());
    }
    SUBCASE("a kind with no eligible site returns nothing") {
        lang::Program no_bounds = lang::parse("print(1 + 2);\n");
        Rng r(1);
        CHECK(!mutate_once(no_bounds, MutationKind::Constraint, r).has_value());
    }
}

TEST_CASE("iterative mutation builds a survivor chain of at most k") {
    const lang::Program parent = knowledge_program("a = 3;\nb = 4;\nprint(a*a + b*b);\n");
    Rng rng(2024);
    const int k = 4;
    const auto chain = mutate_iteratively(parent, k, rng);
    REQUIRE(!chain.empty());
    REQUIRE(chain.size() <= static_cast<std::size_t>(k));

    std::string expected_parent = parent.source_hash;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& m = chain[i];
        CHECK(m.program.mutation_trace.size() == i + 1);
        CHECK(m.program.mutation_trace.back().iteration == static_cast<int>(i + 1));
        CHECK(m.program.provenance.parent_hash == expected_parent);
        CHECK(lang::execute(m.program).status == lang::ExecStatus::Ok);
        expected_parent = m.program.source_hash;
    }

    SUBCASE("k = 0 yields no mutants") {
        Rng r(1);
        CHECK(mutate_iteratively(parent, 0, r).empty());
    }
}

TEST_CASE("final program set unions originals with mutants, hash-deduplicated") {
    synthesis::ProgramSet originals;
    const lang::Program a = knowledge_program("print(5 + 5);\n");
    const lang::Program b = knowledge_program("print(6 * 6);\n");
    originals.insert(a);
    originals.insert(b);

    Rng rng(3);
    std::vector<MutantCandidate> mutants = mutate_iteratively(a, 2, rng);
    REQUIRE(!mutants.empty());
    mutants.push_back(mutants.front());  // duplicate must collapse

    const synthesis::ProgramSet final_set = build_final_program_set(originals, mutants);
    CHECK(final_set.size() == 2 + mutants.size() - 1);
    CHECK(final_set.source_counts.at("mutant") == mutants.size() - 1);
    CHECK(final_set.contains(a.source_hash));
    CHECK(final_set.contains(b.source_hash));
}

TEST_CASE("complexity score orders parent below grown mutants") {
    const lang::Program simple = lang::parse("print(1 + 2);\n");
    const lang::Program bigger = lang::parse(
        "sym x;\n"
        "assume x > 0;\n"
        "t = gcd(4, 6);\n"
        "s = solve([x*x == 4], [x]);\n"
        "print(s);\n");
    const ComplexityScore a = complexity_score(simple);
    const ComplexityScore b = complexity_score(bigger);
    CHECK(a.nodes < b.nodes);
    CHECK(a.statements < b.statements);
    CHECK(a.distinct_builtins == 0);
    CHECK(b.distinct_builtins == 2);
    CHECK(b.constraint_count == 1);
    CHECK(a == complexity_score(lang::parse("print(1 + 2);\n")));
}
