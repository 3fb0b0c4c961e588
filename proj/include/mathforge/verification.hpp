#pragma once

// Bilateral verification: a candidate (program, question, solution) survives
// only when the answer extracted from the solution text is equivalent to the
// value the program actually prints.
//
// Equivalence is typed: exact for rationals, surds, booleans, polynomials
// and (element-wise, ordered) lists; within tolerance
//     |x - y| <= max(1e-9, 1e-6 * max(|x|, |y|))
// evaluated in exact rational arithmetic whenever a decimal is involved;
// multiset comparison for solution sets.  Unparseable answers fall back to
// a normalized string comparison against the canonical output.
//
// A question-consistency gate runs before answer checking: in Template mode
// the question must regenerate byte-for-byte from the program, so any edit
// to the question text (a corrupted numeral included) is rejected.

#include "mathforge/synthesis.hpp"
#include "mathforge/translation.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mathforge::verification {

enum class VerdictReason {
    Match,
    AnswerMismatch,
    ExecutionFailed,
    NoAnswerFound,
    QuestionGenFailed,
};

std::string verdict_reason_name(VerdictReason r);

struct Verdict {
    bool accepted = false;
    VerdictReason reason = VerdictReason::Match;
};

// Typed answer-vs-output equivalence described above.
bool answers_equivalent(const translation::Answer& answer, const lang::Value& output);

// Core per-sample check over a fully materialized triple.
Verdict check_sample(const lang::Program& p, const translation::Question& q,
                     const translation::Solution& solution,
                     const translation::TranslationContext& ctx);

struct CandidateSample {
    translation::Question question;
    translation::Solution solution;
    std::optional<translation::Answer> answer;
    Verdict verdict;
};

// Executes p, generates a question and n_samples solutions, and checks each
// sample.  Failure modes surface as single entries with the matching reason.
std::vector<CandidateSample> verify_candidate(const lang::Program& p,
                                              const translation::TranslationContext& ctx,
                                              int n_samples = 1);

struct VerifiedItem {
    lang::Program program;
    translation::Question question;
    translation::Solution solution;
    std::string answer_text;  // canonical program output
    std::vector<std::string> topic_ids;
    std::string seed_id;
    std::string language;
    int sample_index = 0;
};

struct VerdictLogEntry {
    std::string program_hash;
    int sample_index = 0;
    bool accepted = false;
    std::string reason;
};

struct VerificationReport {
    std::size_t candidates = 0;
    std::size_t samples = 0;
    std::size_t accepted = 0;
    std::map<std::string, std::size_t> reason_counts;
};

// Verifies every program of the set (iteration is in source-hash order) and
// keeps the accepted samples.  Mutants inherit topic provenance, which the
// mutation operators already copy onto their provenance records.
std::vector<VerifiedItem> build_verified_corpus(const synthesis::ProgramSet& programs,
                                                const translation::TranslationContext& ctx,
                                                int n_samples = 1,
                                                VerificationReport* report = nullptr,
                                                std::vector<VerdictLogEntry>* log = nullptr);

}  // namespace mathforge::verification
