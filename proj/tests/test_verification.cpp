#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mathforge/parser.hpp"
#include "mathforge/verification.hpp"

using namespace mathforge;
using namespace mathforge::verification;

namespace {

const std::string kAssets = MATHFORGE_ASSETS_DIR;

translation::TranslationContext en_context() {
    translation::TranslationContext ctx;
    ctx.templates = translation::load_template_file(kAssets + "/templates_en.json");
    return ctx;
}

translation::Answer answer_from(const std::string& text) {
    translation::Answer a;
    a.raw_text = text;
    a.parsed = translation::parse_answer_value(text);
    return a;
}

lang::Value output_of(const std::string& src) {
    const auto r = lang::run_source(src);
    REQUIRE(r.status == lang::ExecStatus::Ok);
    return *r.output;
}

} // namespace

TEST_CASE("typed equivalence: exact kinds demand exactness") {
    CHECK(answers_equivalent(answer_from("2/4"), output_of("print(1/2);\n")));
    CHECK(!answers_equivalent(answer_from("1/2"), output_of("print(1/3);\n")));
    CHECK(answers_equivalent(answer_from("2*sqrt(2)"), output_of("print(sqrt(8));\n")));
    CHECK(answers_equivalent(answer_from("x^2 - 1"),
                             output_of("sym x;\nprint(expand((x - 1)*(x + 1)));\n")));
    CHECK(!answers_equivalent(answer_from("x^2 + 1"),
                              output_of("sym x;\nprint(expand((x - 1)*(x + 1)));\n")));
    CHECK(answers_equivalent(answer_from("true"), output_of("print(1 < 2);\n")));
    CHECK(answers_equivalent(answer_from("[1, 4, 9]"), output_of("print([1, 2*2, 3*3]);\n")));
    CHECK(!answers_equivalent(answer_from("[9, 4, 1]"), output_of("print([1, 4, 9]);\n")));
}

TEST_CASE("decimal comparisons use the absolute/relative tolerance") {
    const lang::Value third = output_of("print(1/3);\n");
    // 12 significant digits of 1/3: off by ~3.3e-13, inside 1e-9.
    CHECK(answers_equivalent(answer_from("0.333333333333"), third));
    CHECK(!answers_equivalent(answer_from("0.3334"), third));

    // Relative tolerance: 1e12 vs 1e12 + 1e5 (rel. error 1e-7 > 1e-6 * ... no,
    // 1e5/1e12 = 1e-7 which is within 1e-6) -> accepted; 1e12 + 1e7 is not.
    const lang::Value big = output_of("print(evalf(1000000000000));\n");
    CHECK(answers_equivalent(answer_from("1000000100000.0"), big));
    CHECK(!answers_equivalent(answer_from("1000010000000.0"), big));

    // Absolute floor near zero: 1e-10 differences pass, 1e-8 do not.
    const lang::Value zero = output_of("print(evalf(0));\n");
    CHECK(answers_equivalent(answer_from("0.0000000001"), zero));
    CHECK(!answers_equivalent(answer_from("0.00000001"), zero));
}

TEST_CASE("solution sets match as multisets of alternatives") {
    const lang::Value roots = output_of("sym x;\ns = solve([x*x == 9], [x]);\nprint(s);\n");
    CHECK(answers_equivalent(answer_from("{x: -3} | {x: 3}"), roots));
    CHECK(answers_equivalent(answer_from("{x: 3} | {x: -3}"), roots));  // order-free
    CHECK(!answers_equivalent(answer_from("{x: 3}"), roots));           // missing root
    CHECK(!answers_equivalent(answer_from("{x: 3} | {x: 3}"), roots));  // multiset, not set
    CHECK(answers_equivalent(answer_from("{}"), output_of(
        "sym x;\nassume x > 10;\ns = solve([x*x == 9], [x]);\nprint(s);\n")));
}

TEST_CASE("unparseable answers fall back to normalized text equality") {
    const lang::Value v = output_of("print(3/2);\n");
    CHECK(answers_equivalent(answer_from("untyped   3/2"), v) == false);
    translation::Answer odd;
    odd.raw_text = "  3/2 ";  // parses; kept for contrast
    odd.parsed = std::nullopt; // force the text path
    CHECK(answers_equivalent(odd, v));
    odd.raw_text = "3 / 2";
    CHECK(!answers_equivalent(odd, v));
}

TEST_CASE("verify_candidate accepts faithful template candidates") {
    const translation::TranslationContext ctx = en_context();
    const lang::Program p = lang::parse("a = 84;\ng = gcd(a, 36);\nprint(g);\n");
    const auto samples = verify_candidate(p, ctx, /*n_samples=*/3);
    REQUIRE(samples.size() == 1);  // template mode: one deterministic sample
    CHECK(samples[0].verdict.accepted);
    CHECK(samples[0].verdict.reason == VerdictReason::Match);
    REQUIRE(samples[0].answer.has_value());
    CHECK(samples[0].answer->raw_text == "12");
}

TEST_CASE("fault injection: each corruption class flips the verdict") {
    const translation::TranslationContext ctx = en_context();
    const lang::Program p = lang::parse("a = 84;\ng = gcd(a, 36);\nprint(g);\n");
    const translation::Question q = translation::generate_question(p, ctx);
    const translation::Solution s = translation::generate_solutions(p, q, ctx, 1)[0];
    REQUIRE(check_sample(p, q, s, ctx).accepted);

    SUBCASE("(a) corrupted solution sentinel value") {
        translation::Solution bad = s;
        bad.text += "1";  // 12 -> 121
        const Verdict v = check_sample(p, q, bad, ctx);
        CHECK(!v.accepted);
        CHECK(v.reason == VerdictReason::AnswerMismatch);

        translation::Solution gone = s;
        gone.text = "No sentinel line at all.";
        const Verdict v2 = check_sample(p, q, gone, ctx);
        CHECK(!v2.accepted);
        CHECK(v2.reason == VerdictReason::NoAnswerFound);
    }
    SUBCASE("(b) corrupted question numeral") {
        translation::Question bad = q;
        const std::size_t digit = bad.text.find("84");
        REQUIRE(digit != std::string::npos);
        bad.text[digit] = '9';
        const Verdict v = check_sample(p, bad, s, ctx);
        CHECK(!v.accepted);
        CHECK(v.reason == VerdictReason::QuestionGenFailed);
    }
    SUBCASE("(c) corrupted program constant after translation") {
        lang::Program bad = lang::parse("a = 85;\ng = gcd(a, 36);\nprint(g);\n");
        const Verdict v = check_sample(bad, q, s, ctx);
        CHECK(!v.accepted);
        // The regenerated question no longer matches the stored one.
        CHECK(v.reason == VerdictReason::QuestionGenFailed);
    }
    SUBCASE("a program that stops executing is rejected as such") {
        const lang::Program boom = lang::parse("g = 1/0;\nprint(g);\n");
        const Verdict v = check_sample(boom, q, s, ctx);
        CHECK(!v.accepted);
        CHECK(v.reason == VerdictReason::ExecutionFailed);
    }
}

TEST_CASE("build_verified_corpus fills reports, logs, and provenance") {
    const translation::TranslationContext ctx = en_context();

    synthesis::ProgramSet programs;
    lang::Program good = lang::parse("print(6*7);\n");
    good.provenance.kind = lang::ProvenanceKind::Knowledge;
    good.provenance.topic_ids = {"topic-x"};
    programs.insert(good);

    lang::Program mutant = lang::parse("m = 6;\nprint(m*7);\n");
    mutant.provenance.kind = lang::ProvenanceKind::Mutant;
    mutant.provenance.topic_ids = {"topic-x"};
    mutant.provenance.parent_hash = good.source_hash;
    programs.insert(mutant);

    lang::Program failing = lang::parse("z = 1/0;\nprint(z);\n");
    failing.provenance.kind = lang::ProvenanceKind::Knowledge;
    programs.insert(failing);

    VerificationReport report;
    std::vector<VerdictLogEntry> log;
    const auto items = build_verified_corpus(programs, ctx, 1, &report, &log);

    CHECK(items.size() == 2);
    for (const auto& item : items) {
        CHECK(item.topic_ids == std::vector<std::string>{"topic-x"});
        CHECK(item.language == "en");
        CHECK(item.answer_text == "42");
        CHECK(item.sample_index == 0);
    }
    CHECK(report.candidates == 3);
    CHECK(report.accepted == 2);
    CHECK(report.reason_counts.at("Match") == 2);
    CHECK(report.reason_counts.at("ExecutionFailed") == 1);
    REQUIRE(log.size() == 3);
    std::size_t accepted_in_log = 0;
    for (const auto& entry : log) accepted_in_log += entry.accepted ? 1 : 0;
    CHECK(accepted_in_log == 2);
}
