#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mathforge/parser.hpp"
#include "mathforge/translation.hpp"

#include <fstream>

using namespace mathforge;
using namespace mathforge::translation;

namespace {

const std::string kAssets = MATHFORGE_ASSETS_DIR;

TranslationContext en_context() {
    TranslationContext ctx;
    ctx.templates = load_template_file(kAssets + "/templates_en.json");
    return ctx;
}

Question question_for(const std::string& src, const TranslationContext& ctx) {
    return generate_question(lang::parse(src), ctx);
}

} // namespace

TEST_CASE("canonical question strings for the two reference programs") {
    const TranslationContext ctx = en_context();
    CHECK(question_for("sym x;\ns = solve([x + 2 == 5], [x]);\nprint(s);\n", ctx).text ==
          "Find the value of x such that x + 2 = 5.");
    CHECK(question_for("print(7/2);\n", ctx).text == "What is the value of 7/2?");
}

TEST_CASE("classification covers every program shape") {
    SUBCASE("solve with several unknowns and extra givens") {
        const SkeletonMatch m = classify_program(lang::parse(
            "sym x y;\n"
            "a = 3;\n"
            "s = solve([x + y == a, x - y == 1], [x, y]);\n"
            "print(s);\n"));
        CHECK(m.skeleton_id == "solve");
        CHECK(m.slots.at("unknowns") == "x and y");
        CHECK(m.slots.at("conditions") == "x + y = a and x - y = 1 and a = 3");
        CHECK(m.unknown_names == std::vector<std::string>{"x", "y"});
        CHECK(m.condition_texts.size() == 3);
    }
    SUBCASE("builtin call skeletons with givens") {
        const SkeletonMatch m =
            classify_program(lang::parse("a = 84;\ng = gcd(a, 36);\nprint(g);\n"));
        CHECK(m.skeleton_id == "gcd_pair");
        CHECK(m.slots.at("a") == "a");
        CHECK(m.slots.at("b") == "36");
        REQUIRE(m.givens.size() == 1);
        CHECK(m.givens[0] == "a = 84");
    }
    SUBCASE("strict loop-sum shapes") {
        CHECK(classify_program(lang::parse(
                  "t = 0;\nfor i in 1..9 {\n    t = t + i;\n}\nprint(t);\n"))
                  .skeleton_id == "loop_sum");
        const SkeletonMatch sq = classify_program(lang::parse(
            "t = 0;\nfor i in 1..6 {\n    t = t + i*i;\n}\nprint(t);\n"));
        CHECK(sq.skeleton_id == "loop_sum_squares");
        CHECK(sq.slots.at("n") == "6");
        // Any deviation from the strict shape falls back to the listing.
        CHECK(classify_program(lang::parse(
                  "t = 1;\nfor i in 1..9 {\n    t = t + i;\n}\nprint(t);\n"))
                  .skeleton_id == "straight_line");
    }
    SUBCASE("control flow uses the catch-all listing") {
        const SkeletonMatch m = classify_program(
            lang::parse("x = 3;\nif x < 4 {\n    y = 1;\n} else {\n    y = 2;\n}\nprint(y);\n"));
        CHECK(m.skeleton_id == "straight_line");
        CHECK(m.slots.at("program_listing").find("if x < 4 {") != std::string::npos);
    }
    SUBCASE("plain expression prints are const_eval") {
        const SkeletonMatch m = classify_program(lang::parse("print(2^6 - 2^5);\n"));
        CHECK(m.skeleton_id == "const_eval");
        CHECK(m.slots.at("expr") == "2^6 - 2^5");
    }
}

TEST_CASE("questions embed given clauses through the template connectors") {
    const TranslationContext ctx = en_context();
    const Question q = question_for("a = 84;\ng = gcd(a, 36);\nprint(g);\n", ctx);
    CHECK(q.text == "What is the greatest common divisor of a and 36, given that a = 84?");
    CHECK(q.language == "en");

    SUBCASE("the zh file swaps both phrasing and connectors") {
        TranslationContext zh;
        zh.templates = load_template_file(kAssets + "/templates_zh.json");
        const Question qz = question_for("a = 84;\ng = gcd(a, 36);\nprint(g);\n", zh);
        CHECK(qz.language == "zh");
        CHECK(qz.text.find("最大公约数") != std::string::npos);
        CHECK(qz.text.find("已知") != std::string::npos);
        CHECK(qz.text.find("given") == std::string::npos);
    }
}

TEST_CASE("template files: round-trip, missing-skeleton and bad-file errors") {
    const TemplateFile f = load_template_file(kAssets + "/templates_en.json");
    CHECK(f.version == "en-v1");
    CHECK(f.language == "en");
    CHECK(f.skeletons.size() == 20);
    CHECK(f.skeletons.count("solve") == 1);
    CHECK(f.skeletons.count("straight_line") == 1);

    CHECK_THROWS(parse_template_file("not json"));
    CHECK_THROWS(parse_template_file(R"({"version": "v", "language": "en"})"));
    CHECK_THROWS(parse_template_file(
        R"({"version":"v","language":"en","answer_template":"A {answer}",
            "given_connector":", ","and_connector":" and ",
            "skeletons":{"solve":{"question_template":"q","step_templates":[]}}})"));

    SUBCASE("a file without the matched skeleton raises TemplateMiss") {
        TranslationContext ctx;
        ctx.templates = load_template_file(kAssets + "/templates_en.json");
        ctx.templates.skeletons.erase("const_eval");
        CHECK_THROWS_AS(question_for("print(1 + 1);\n", ctx), TemplateMiss);
    }
    SUBCASE("templates referencing unknown slots raise TemplateMiss") {
        TranslationContext ctx;
        ctx.templates = load_template_file(kAssets + "/templates_en.json");
        ctx.templates.skeletons["const_eval"].question_template = "What about {nonexistent}?";
        CHECK_THROWS_AS(question_for("print(1 + 1);\n", ctx), TemplateMiss);
    }
}

TEST_CASE("template-mode solutions: deterministic single sample ending in the sentinel") {
    const TranslationContext ctx = en_context();
    const lang::Program p = lang::parse("a = 6;\nb = 7;\nprint(a * b);\n");
    const Question q = generate_question(p, ctx);

    const auto solutions = generate_solutions(p, q, ctx, /*n_samples=*/5);
    REQUIRE(solutions.size() == 1);  // template mode ignores the sample count
    CHECK(solutions[0].sample_index == 0);
    CHECK(solutions[0].program_hash == p.source_hash);

    const std::string& text = solutions[0].text;
    CHECK(text.find("a = 6") != std::string::npos);
    CHECK(text.find("b = 7") != std::string::npos);
    const std::string sentinel = "The answer is: 42";
    REQUIRE(text.size() >= sentinel.size());
    CHECK(text.substr(text.size() - sentinel.size()) == sentinel);

    // Pure function of (program, templates): regeneration is byte-identical.
    CHECK(generate_solutions(p, q, ctx, 1)[0].text == text);
}

TEST_CASE("answer extraction finds the last sentinel, case-insensitively") {
    auto answer_of = [](const std::string& text) {
        Solution s;
        s.text = text;
        return extract_answer(s);
    };
    CHECK(answer_of("The answer is: 7")->raw_text == "7");
    CHECK(answer_of("the ANSWER is 3/2")->raw_text == "3/2");
    CHECK(answer_of("The answer is: 1\nWait.\nThe answer is: 2")->raw_text == "2");
    CHECK(answer_of("We get x = 4.\nThe answer is:   -4/9  ")->raw_text == "-4/9");
    CHECK(!answer_of("No sentinel anywhere").has_value());
    CHECK(!answer_of("The answer is:").has_value());  // empty tail
}

TEST_CASE("answer text parses back into the value tower") {
    auto parsed = [](const std::string& text) {
        const auto v = parse_answer_value(text);
        REQUIRE(v.has_value());
        return lang::canonicalize_value(*v);
    };
    CHECK(parsed("7") == "7");
    CHECK(parsed("-3/9") == "-1/3");
    CHECK(parsed("0.5") == "0.5");
    CHECK(parsed("2.50e2") == "250");
    CHECK(parsed("true") == "true");
    CHECK(parsed("2*sqrt(2)") == "2*sqrt(2)");
    CHECK(parsed("1 + sqrt(5)") == "1 + sqrt(5)");
    CHECK(parsed("x^2 + 2*x + 1") == "x^2 + 2*x + 1");
    CHECK(parsed("[1, 2, 3]") == "[1, 2, 3]");
    CHECK(parsed("{x: 1} | {x: -1}") == "{x: -1} | {x: 1}");  // canonical order
    CHECK(parsed("{}") == "{}");
    CHECK(parsed("{x: 1, y: 2/3}") == "{x: 1, y: 2/3}");

    CHECK(!parse_answer_value("").has_value());
    CHECK(!parse_answer_value("no idea").has_value());
    CHECK(!parse_answer_value("{} | {x: 1}").has_value());  // mixed arity set
    CHECK(!parse_answer_value("1/0").has_value());
}

TEST_CASE("straight_line listing questions regenerate the full program text") {
    const TranslationContext ctx = en_context();
    // The nonzero accumulator init keeps this out of the strict loop_sum
    // shape, so it falls through to the straight_line listing.
    const lang::Program p = lang::parse(
        "acc = 1;\nfor i in 1..5 {\n    acc = acc + i;\n}\nprint(acc);\n");
    REQUIRE(classify_program(p).skeleton_id == "straight_line");
    const Question q = generate_question(p, ctx);
    CHECK(q.text.find("for i in 1..5 {") != std::string::npos);
    CHECK(q.text.find("print(acc);") != std::string::npos);

    const auto sols = generate_solutions(p, q, ctx, 1);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].text.find("The answer is: 16") != std::string::npos);
}
