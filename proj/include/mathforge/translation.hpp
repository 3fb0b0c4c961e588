#pragma once

// Translation: programs -> natural-language questions and worked solutions,
// plus answer extraction from solution text.
//
// Template mode classifies a program into one of a fixed set of skeleton
// shapes and fills the corresponding entry of a versioned template file; the
// question is a pure function of the program and the file, so verification
// can regenerate and cross-check it byte for byte.  External mode asks the
// configured endpoint.  Answer extraction is shared by both modes: the last
// case-insensitive "the answer is" sentinel wins, and the captured tail is
// parsed back into a DSL value whenever possible.

#include "mathforge/ast.hpp"
#include "mathforge/generator.hpp"
#include "mathforge/interpreter.hpp"
#include "mathforge/value.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mathforge::translation {

struct Question {
    std::string text;
    std::string language;      // "en" | "zh"
    std::string program_hash;  // hash of the program it was generated from
};

struct Solution {
    std::string text;
    int sample_index = 0;
    std::string program_hash;
};

struct Answer {
    std::string raw_text;               // sentinel tail, whitespace-trimmed
    std::optional<lang::Value> parsed;  // nullopt when not a readable value
};

// ---------------------------------------------------------------------------
// Template file: skeleton id -> question/step templates, with connector
// phrases used to assemble "given that ..." clauses in the file's language.

struct SkeletonTemplates {
    std::string question_template;            // uses {slot} placeholders
    std::vector<std::string> step_templates;  // per traced binding; the last
                                              // entry repeats for the tail
};

struct TemplateFile {
    std::string version;
    std::string language;
    std::string answer_template;  // e.g. "The answer is: {answer}"
    std::string given_connector;  // e.g. ", given that "
    std::string and_connector;    // e.g. " and "
    std::map<std::string, SkeletonTemplates> skeletons;
};

TemplateFile load_template_file(const std::string& path);
TemplateFile parse_template_file(const std::string& json_text);

class TemplateMiss : public std::runtime_error {
public:
    explicit TemplateMiss(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Program classification (Template mode).  Total: every well-formed program
// falls into some skeleton, with `straight_line` as the catch-all listing.

struct SkeletonMatch {
    std::string skeleton_id;
    std::map<std::string, std::string> slots;  // never includes given_clause
    std::vector<std::string> givens;           // rendered side conditions
    // Filled by the solve skeleton only; lets question generation re-join
    // the pieces with the template file's own connector word.  The slot
    // values keep a plain " and " join as the language-neutral default.
    std::vector<std::string> unknown_names;
    std::vector<std::string> condition_texts;
};

SkeletonMatch classify_program(const lang::Program& p);

// ---------------------------------------------------------------------------
// Generation context shared by question/solution generation.

struct TranslationContext {
    gen::GeneratorConfig generator;
    TemplateFile templates;
    lang::Limits limits;
};

// Throws TemplateMiss when the template file lacks the matched skeleton;
// gen::AdapterError propagates from External mode.
Question generate_question(const lang::Program& p, const TranslationContext& ctx);

// Template mode emits exactly one deterministic solution (sample_index 0),
// regardless of n_samples; External mode draws n_samples completions.
std::vector<Solution> generate_solutions(const lang::Program& p, const Question& q,
                                         const TranslationContext& ctx, int n_samples);

// Sentinel scan; nullopt when no "the answer is" line exists.
std::optional<Answer> extract_answer(const Solution& s);

// Reads a canonical DSL value back from text: booleans, solution sets,
// lists, decimals, and any arithmetic/sqrt expression over free symbols.
std::optional<lang::Value> parse_answer_value(const std::string& text);

}  // namespace mathforge::translation
