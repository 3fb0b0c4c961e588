#pragma once

// Generation adapter: a single seam through which every natural-language or
// program-producing request flows.  Two modes share one interface:
//
//   * Template mode runs fully offline and deterministic; it never performs
//     I/O and is the mode used by all tests and the toy pipeline.
//   * External mode POSTs prompts to an HTTP endpoint speaking a minimal
//     JSON contract: request {"prompt": "..."} -> response {"completion": "..."}.
//
// Prompt templates are named, versioned strings with {slot} placeholders so
// External mode can be pointed at any instruction-following model without
// code changes.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mathforge::gen {

enum class PromptId {
    ProgramFromTopics,   // topics+tools -> new program
    ProgramFromSeed,     // natural-language question -> program that answers it
    RewriteProgram,      // program -> harder variants (JSON list contract)
    QuestionFromProgram, // program -> natural-language question
    SolutionFromQuestion // question(+program) -> worked solution
};

std::string prompt_id_name(PromptId id);

struct PromptTemplate {
    PromptId id;
    std::string name;     // stable string key, mirrors prompt_id_name
    std::string version;  // bumped whenever wording changes
    std::string text;     // contains {slot} placeholders
    std::vector<std::string> slots;  // every slot the adapter will fill
};

// Built-in prompt set.  Invariant (checked by validate_prompts and tests):
// every declared slot occurs at least once in the template text.
const std::vector<PromptTemplate>& default_prompts();
const PromptTemplate& prompt_for(PromptId id);
void validate_prompts(const std::vector<PromptTemplate>& prompts);

// Replaces each {key} with its value.  Throws std::invalid_argument if a
// declared slot of the template has no value supplied.
std::string fill_prompt(const PromptTemplate& tpl,
                        const std::map<std::string, std::string>& values);

// Returns the body of the first fenced block ``` ... ``` in a completion,
// tolerating an info tag after the opening fence.  Used to pull programs and
// JSON payloads out of free-form model output.
std::optional<std::string> first_fenced_block(const std::string& completion,
                                              const std::string& tag = "");

enum class GeneratorMode { Template, External };

struct GeneratorConfig {
    GeneratorMode mode = GeneratorMode::Template;
    std::string endpoint;          // e.g. "http://127.0.0.1:8080/complete"
    std::string model_name = "template-v1";
    int max_retries = 2;           // additional attempts after the first
    int timeout_ms = 10000;
};

class AdapterError : public std::runtime_error {
public:
    explicit AdapterError(const std::string& what) : std::runtime_error(what) {}
};

// External-mode HTTP client.  complete() retries transient failures up to
// cfg.max_retries times and throws AdapterError once attempts are exhausted
// or the response is malformed.
class ExternalClient {
public:
    explicit ExternalClient(GeneratorConfig cfg);
    std::string complete(const std::string& prompt) const;

private:
    GeneratorConfig cfg_;
    std::string host_;
    int port_ = 80;
    std::string path_;
};

}  // namespace mathforge::gen
