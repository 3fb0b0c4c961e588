#include "mathforge/generator.hpp"

#include <nlohmann/json.hpp>

// httplib is header-only; keep it out of public headers so only this
// translation unit pays the compile cost.
#include <httplib.h>

#include <sstream>

namespace mathforge::gen {

std::string prompt_id_name(PromptId id) {
    switch (id) {
        case PromptId::ProgramFromTopics: return "program_from_topics";
        case PromptId::ProgramFromSeed: return "program_from_seed";
        case PromptId::RewriteProgram: return "rewrite_program";
        case PromptId::QuestionFromProgram: return "question_from_program";
        case PromptId::SolutionFromQuestion: return "solution_from_question";
    }
    return "unknown";
}

namespace {

std::vector<PromptTemplate> build_default_prompts() {
    std::vector<PromptTemplate> out;

    out.push_back(PromptTemplate{
        PromptId::ProgramFromTopics, "program_from_topics", "1",
        "You are preparing exercises for a math class.\n"
        "Course topics: {topics}\n"
        "Operations you may call: {tools}\n\n"
        "Write one short program in the calculator language that poses and\n"
        "solves a single problem drawing on those topics. Declare unknowns\n"
        "with `sym`, state side conditions with `assume`, and make the last\n"
        "statement `print(...)` so the program reports exactly one value.\n"
        "Reply with the program inside a fenced code block and nothing else.",
        {"topics", "tools"}});

    out.push_back(PromptTemplate{
        PromptId::ProgramFromSeed, "program_from_seed", "1",
        "Translate the question below into a program in the calculator\n"
        "language. The program must compute the requested value and finish\n"
        "with a `print(...)` statement that outputs it. Reply with the\n"
        "program inside a fenced code block and nothing else.\n\n"
        "Question:\n{seed_question}",
        {"seed_question"}});

    out.push_back(PromptTemplate{
        PromptId::RewriteProgram, "rewrite_program", "1",
        "Rewrite the program below into more challenging variants while\n"
        "keeping it runnable. You may tighten or add constraints, promote\n"
        "constants to symbolic variables, perturb numeric constants, or add\n"
        "control flow. Reply with a fenced block tagged\n"
        "rewrite_program_list containing a JSON array; each element must\n"
        "have the keys \"program\" (the rewritten code), \"methods\" (the\n"
        "list of strategies you applied), and \"comment\" (one sentence on\n"
        "what changed).\n\n"
        "Program:\n{program}",
        {"program"}});

    out.push_back(PromptTemplate{
        PromptId::QuestionFromProgram, "question_from_program", "1",
        "Read the program below and write the natural-language math question\n"
        "it answers, in {language}. Keep every number exactly as it appears\n"
        "in the program, do not mention the program itself, and phrase it so\n"
        "a student could answer from the question alone. Reply with the\n"
        "question text only.\n\n"
        "Program:\n{program}",
        {"program", "language"}});

    out.push_back(PromptTemplate{
        PromptId::SolutionFromQuestion, "solution_from_question", "1",
        "Write a step-by-step solution, in {language}, to the question\n"
        "below. Explain each stage of the reasoning in full sentences and\n"
        "finish with a final line of the exact form:\n"
        "The answer is: <value>\n\n"
        "Question:\n{question}\n\n"
        "Reference program (for your eyes only, never cite it):\n{program}",
        {"question", "program", "language"}});

    validate_prompts(out);
    return out;
}

}  // namespace

const std::vector<PromptTemplate>& default_prompts() {
    static const std::vector<PromptTemplate> prompts = build_default_prompts();
    return prompts;
}

const PromptTemplate& prompt_for(PromptId id) {
    for (const auto& p : default_prompts())
        if (p.id == id) return p;
    throw std::logic_error("prompt_for: no template registered");
}

void validate_prompts(const std::vector<PromptTemplate>& prompts) {
    for (const auto& p : prompts) {
        for (const auto& slot : p.slots) {
            const std::string needle = "{" + slot + "}";
            if (p.text.find(needle) == std::string::npos)
                throw std::logic_error("prompt template '" + p.name +
                                       "' is missing slot " + needle);
        }
    }
}

std::string fill_prompt(const PromptTemplate& tpl,
                        const std::map<std::string, std::string>& values) {
    std::string text = tpl.text;
    for (const auto& slot : tpl.slots) {
        auto it = values.find(slot);
        if (it == values.end())
            throw std::invalid_argument("fill_prompt: no value for slot {" +
                                        slot + "}");
        const std::string needle = "{" + slot + "}";
        std::size_t pos = 0;
        while ((pos = text.find(needle, pos)) != std::string::npos) {
            text.replace(pos, needle.size(), it->second);
            pos += it->second.size();
        }
    }
    return text;
}

std::optional<std::string> first_fenced_block(const std::string& completion,
                                              const std::string& tag) {
    const std::string fence = "```";
    std::size_t open = 0;
    while ((open = completion.find(fence, open)) != std::string::npos) {
        std::size_t info_begin = open + fence.size();
        std::size_t line_end = completion.find('\n', info_begin);
        if (line_end == std::string::npos) return std::nullopt;
        std::string info = completion.substr(info_begin, line_end - info_begin);
        // Trim surrounding whitespace from the info string.
        while (!info.empty() && (info.back() == ' ' || info.back() == '\r'))
            info.pop_back();
        std::size_t first = info.find_first_not_of(' ');
        if (first != std::string::npos && first > 0) info = info.substr(first);

        std::size_t close = completion.find(fence, line_end + 1);
        if (close == std::string::npos) return std::nullopt;
        if (tag.empty() || info == tag) {
            std::string body = completion.substr(line_end + 1, close - line_end - 1);
            return body;
        }
        open = close + fence.size();
    }
    return std::nullopt;
}

ExternalClient::ExternalClient(GeneratorConfig cfg) : cfg_(std::move(cfg)) {
    // Accept endpoints of the form http://host:port/path (port and path
    // optional).  Anything else is a configuration error.
    std::string rest = cfg_.endpoint;
    const std::string scheme = "http://";
    if (rest.rfind(scheme, 0) != 0)
        throw AdapterError("external endpoint must start with http://");
    rest = rest.substr(scheme.size());
    std::size_t slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    std::size_t colon = hostport.find(':');
    if (colon == std::string::npos) {
        host_ = hostport;
        port_ = 80;
    } else {
        host_ = hostport.substr(0, colon);
        try {
            port_ = std::stoi(hostport.substr(colon + 1));
        } catch (const std::exception&) {
            throw AdapterError("external endpoint has a malformed port");
        }
    }
    if (host_.empty()) throw AdapterError("external endpoint has an empty host");
}

std::string ExternalClient::complete(const std::string& prompt) const {
    nlohmann::json req;
    req["prompt"] = prompt;
    req["model"] = cfg_.model_name;
    const std::string body = req.dump();

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        httplib::Client client(host_, port_);
        client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
        client.set_read_timeout(cfg_.timeout_ms / 1000,
                                (cfg_.timeout_ms % 1000) * 1000);
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("completion") ||
            !parsed["completion"].is_string()) {
            last_error = "response body lacks a string \"completion\" field";
            continue;
        }
        return parsed["completion"].get<std::string>();
    }
    throw AdapterError("external generator failed after " +
                       std::to_string(cfg_.max_retries + 1) + " attempts (" +
                       last_error + ")");
}

}  // namespace mathforge::gen
