#include "mathforge/verification.hpp"

#include <algorithm>
#include <cctype>

namespace mathforge::verification {

using lang::Rational;
using lang::Value;

std::string verdict_reason_name(VerdictReason r) {
    switch (r) {
        case VerdictReason::Match: return "Match";
        case VerdictReason::AnswerMismatch: return "AnswerMismatch";
        case VerdictReason::ExecutionFailed: return "ExecutionFailed";
        case VerdictReason::NoAnswerFound: return "NoAnswerFound";
        case VerdictReason::QuestionGenFailed: return "QuestionGenFailed";
    }
    return "?";
}

namespace {

// |x - y| <= max(1e-9, 1e-6 * max(|x|, |y|)), all in exact rationals.
bool within_tolerance(const Rational& x, const Rational& y) {
    static const Rational kAbs(lang::BigInt(1), lang::BigInt(1000000000));
    static const Rational kRel(lang::BigInt(1), lang::BigInt(1000000));
    const Rational diff = (x - y).abs();
    const Rational mag = x.abs() < y.abs() ? y.abs() : x.abs();
    const Rational bound = kAbs < kRel * mag ? kRel * mag : kAbs;
    return !(bound < diff);
}

bool value_equivalent(const Value& a, const Value& b);

bool alternative_equivalent(const lang::SolutionAlternative& a,
                            const lang::SolutionAlternative& b) {
    if (a.size() != b.size()) return false;
    // Bindings are sorted by variable name in canonical sets; parsed answers
    // are sorted the same way before comparison.
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].var != b[i].var) return false;
        if (!value_equivalent(a[i].value, b[i].value)) return false;
    }
    return true;
}

bool solution_sets_equivalent(const lang::SolutionSet& a, const lang::SolutionSet& b) {
    if (a.alternatives.size() != b.alternatives.size()) return false;
    std::vector<bool> used(b.alternatives.size(), false);
    for (const auto& alt : a.alternatives) {
        bool matched = false;
        for (std::size_t j = 0; j < b.alternatives.size(); ++j) {
            if (used[j]) continue;
            if (alternative_equivalent(alt, b.alternatives[j])) {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

bool value_equivalent(const Value& a, const Value& b) {
    if (a.is_numeric() && b.is_numeric()) {
        if (!a.is_decimal() && !b.is_decimal()) return lang::compare_numeric(a, b) == 0;
        return within_tolerance(lang::numeric_to_rational(a), lang::numeric_to_rational(b));
    }
    if (a.is_bool() && b.is_bool()) return a.as_bool() == b.as_bool();
    if (a.is_polynomial() && b.is_polynomial()) return lang::values_identical(a, b);
    if (a.is_solution_set() && b.is_solution_set())
        return solution_sets_equivalent(a.as_solution_set(), b.as_solution_set());
    if (a.is_list() && b.is_list()) {
        const auto& la = a.as_list();
        const auto& lb = b.as_list();
        if (la.size() != lb.size()) return false;
        for (std::size_t i = 0; i < la.size(); ++i)
            if (!value_equivalent(la[i], lb[i])) return false;
        return true;
    }
    return false;
}

// Lowercase, whitespace runs collapsed to single spaces, trimmed.
std::string normalize_text(const std::string& s) {
    std::string out;
    bool pending_space = false;
    for (const char ch : s) {
        const unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

}  // namespace

bool answers_equivalent(const translation::Answer& answer, const lang::Value& output) {
    if (answer.parsed) return value_equivalent(*answer.parsed, output);
    return normalize_text(answer.raw_text) == normalize_text(lang::canonicalize_value(output));
}

Verdict check_sample(const lang::Program& p, const translation::Question& q,
                     const translation::Solution& solution,
                     const translation::TranslationContext& ctx) {
    const lang::ExecutionResult run = lang::execute(p, ctx.limits);
    if (run.status != lang::ExecStatus::Ok || !run.output)
        return Verdict{false, VerdictReason::ExecutionFailed};

    // Question-consistency gate.  Template questions are pure functions of
    // the program, so the supplied text must regenerate exactly; External
    // questions only need to be present.
    if (ctx.generator.mode == gen::GeneratorMode::Template) {
        try {
            const translation::Question regen = translation::generate_question(p, ctx);
            if (regen.text != q.text) return Verdict{false, VerdictReason::QuestionGenFailed};
        } catch (const translation::TemplateMiss&) {
            return Verdict{false, VerdictReason::QuestionGenFailed};
        }
    } else if (q.text.empty()) {
        return Verdict{false, VerdictReason::QuestionGenFailed};
    }

    const auto answer = translation::extract_answer(solution);
    if (!answer) return Verdict{false, VerdictReason::NoAnswerFound};

    if (answers_equivalent(*answer, *run.output)) return Verdict{true, VerdictReason::Match};
    return Verdict{false, VerdictReason::AnswerMismatch};
}

std::vector<CandidateSample> verify_candidate(const lang::Program& p,
                                              const translation::TranslationContext& ctx,
                                              int n_samples) {
    std::vector<CandidateSample> out;

    const lang::ExecutionResult run = lang::execute(p, ctx.limits);
    if (run.status != lang::ExecStatus::Ok || !run.output) {
        CandidateSample s;
        s.verdict = Verdict{false, VerdictReason::ExecutionFailed};
        out.push_back(std::move(s));
        return out;
    }

    translation::Question q;
    try {
        q = translation::generate_question(p, ctx);
    } catch (const translation::TemplateMiss&) {
        CandidateSample s;
        s.verdict = Verdict{false, VerdictReason::QuestionGenFailed};
        out.push_back(std::move(s));
        return out;
    }

    const auto solutions = translation::generate_solutions(p, q, ctx, n_samples);
    if (solutions.empty()) {
        CandidateSample s;
        s.question = q;
        s.verdict = Verdict{false, VerdictReason::NoAnswerFound};
        out.push_back(std::move(s));
        return out;
    }
    for (const auto& sol : solutions) {
        CandidateSample s;
        s.question = q;
        s.solution = sol;
        s.answer = translation::extract_answer(sol);
        s.verdict = check_sample(p, q, sol, ctx);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<VerifiedItem> build_verified_corpus(const synthesis::ProgramSet& programs,
                                                const translation::TranslationContext& ctx,
                                                int n_samples, VerificationReport* report,
                                                std::vector<VerdictLogEntry>* log) {
    std::vector<VerifiedItem> verified;
    VerificationReport local;
    for (const auto& p : programs.programs) {
        local.candidates += 1;
        const auto samples = verify_candidate(p, ctx, n_samples);
        const lang::ExecutionResult run = lang::execute(p, ctx.limits);
        for (const auto& s : samples) {
            local.samples += 1;
            local.reason_counts[verdict_reason_name(s.verdict.reason)] += 1;
            if (log)
                log->push_back(VerdictLogEntry{p.source_hash, s.solution.sample_index,
                                               s.verdict.accepted,
                                               verdict_reason_name(s.verdict.reason)});
            if (!s.verdict.accepted) continue;
            local.accepted += 1;
            VerifiedItem item;
            item.program = p;
            item.question = s.question;
            item.solution = s.solution;
            item.answer_text = run.canonical_text.value_or("");
            item.topic_ids = p.provenance.topic_ids;
            item.seed_id = p.provenance.seed_id;
            item.language = s.question.language;
            item.sample_index = s.solution.sample_index;
            verified.push_back(std::move(item));
        }
    }
    if (report) *report = local;
    return verified;
}

}  // namespace mathforge::verification
