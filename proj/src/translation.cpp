#include "mathforge/translation.hpp"

#include "mathforge/parser.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace mathforge::translation {

using lang::AssignStmt;
using lang::AssumeStmt;
using lang::Call;
using lang::Compare;
using lang::ExprPtr;
using lang::ForStmt;
using lang::IfStmt;
using lang::ListLit;
using lang::PrintStmt;
using lang::Program;
using lang::StmtPtr;
using lang::SymStmt;
using lang::VarRef;

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// Relation rendered for prose: "x + 2 == 5" -> "x + 2 = 5".
std::string nl_rel(const ExprPtr& e) {
    std::string s = lang::render_expr(e);
    std::size_t pos;
    while ((pos = s.find(" == ")) != std::string::npos) s.replace(pos, 4, " = ");
    return s;
}

// Single-pass placeholder substitution; every {token} must be a known slot.
std::string fill_template(const std::string& text,
                          const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '{') {
            const std::size_t close = text.find('}', i + 1);
            if (close == std::string::npos)
                throw TemplateMiss("unterminated placeholder in template");
            const std::string token = text.substr(i + 1, close - i - 1);
            auto it = slots.find(token);
            if (it == slots.end())
                throw TemplateMiss("template references unknown slot {" + token + "}");
            out += it->second;
            i = close + 1;
        } else {
            out += text[i++];
        }
    }
    return out;
}

bool has_control_flow(const Program& p) {
    for (const auto& s : p.statements)
        if (std::holds_alternative<ForStmt>(s->node) ||
            std::holds_alternative<IfStmt>(s->node))
            return true;
    return false;
}

// The top-level assignment defining `name`, or nullptr.
const AssignStmt* defining_assignment(const Program& p, const std::string& name,
                                      std::size_t* index_out = nullptr) {
    for (std::size_t i = 0; i < p.statements.size(); ++i) {
        const auto* a = std::get_if<AssignStmt>(&p.statements[i]->node);
        if (a && a->name == name) {
            if (index_out) *index_out = i;
            return a;
        }
    }
    return nullptr;
}

// Side conditions rendered from every statement except the print, the
// primary statement, and sym declarations.
std::vector<std::string> collect_givens(const Program& p, std::size_t primary_index) {
    std::vector<std::string> givens;
    for (std::size_t i = 0; i + 1 < p.statements.size(); ++i) {
        if (i == primary_index) continue;
        const auto& node = p.statements[i]->node;
        if (const auto* a = std::get_if<AssignStmt>(&node)) {
            givens.push_back(a->name + " = " + lang::render_expr(a->value));
        } else if (const auto* as = std::get_if<AssumeStmt>(&node)) {
            givens.push_back(nl_rel(as->condition));
        }
    }
    return givens;
}

// Strict shape check for the two loop-summation skeletons:
//   t = 0; for i in 1..n { t = t + i [* i] ; } print(t);
std::optional<SkeletonMatch> match_loop_sum(const Program& p) {
    if (p.statements.size() != 3) return std::nullopt;
    const auto* init = std::get_if<AssignStmt>(&p.statements[0]->node);
    const auto* loop = std::get_if<ForStmt>(&p.statements[1]->node);
    const auto* pr = std::get_if<PrintStmt>(&p.statements[2]->node);
    if (!init || !loop || !pr) return std::nullopt;
    const auto* out = std::get_if<VarRef>(&pr->value->node);
    if (!out || out->name != init->name) return std::nullopt;
    const auto* zero = std::get_if<lang::NumberLit>(&init->value->node);
    if (!zero || zero->value != 0) return std::nullopt;
    if (loop->from != 1 || loop->body.size() != 1) return std::nullopt;
    const auto* step = std::get_if<AssignStmt>(&loop->body[0]->node);
    if (!step || step->name != init->name) return std::nullopt;
    const auto* add = std::get_if<lang::Binary>(&step->value->node);
    if (!add || add->op != '+') return std::nullopt;
    const auto* base = std::get_if<VarRef>(&add->lhs->node);
    if (!base || base->name != init->name) return std::nullopt;

    SkeletonMatch m;
    m.slots["n"] = std::to_string(loop->to);
    const auto* plain = std::get_if<VarRef>(&add->rhs->node);
    if (plain && plain->name == loop->var) {
        m.skeleton_id = "loop_sum";
        return m;
    }
    const auto* sq = std::get_if<lang::Binary>(&add->rhs->node);
    if (sq && sq->op == '*') {
        const auto* l = std::get_if<VarRef>(&sq->lhs->node);
        const auto* r = std::get_if<VarRef>(&sq->rhs->node);
        if (l && r && l->name == loop->var && r->name == loop->var) {
            m.skeleton_id = "loop_sum_squares";
            return m;
        }
    }
    return std::nullopt;
}

struct CallSkeleton {
    const char* id;
    std::vector<const char*> arg_slots;
};

// Builtin -> skeleton id and slot names for its rendered arguments.
const std::map<std::string, CallSkeleton>& call_skeletons() {
    static const std::map<std::string, CallSkeleton> table = {
        {"gcd", {"gcd_pair", {"a", "b"}}},
        {"lcm", {"lcm_pair", {"a", "b"}}},
        {"abs", {"abs_value", {"a"}}},
        {"mod", {"mod_pair", {"a", "b"}}},
        {"floor", {"floor_value", {"a"}}},
        {"sqrt", {"sqrt_value", {"a"}}},
        {"pow", {"power_value", {"a", "b"}}},
        {"min", {"min_pair", {"a", "b"}}},
        {"max", {"max_pair", {"a", "b"}}},
        {"evalf", {"decimal_value", {"a"}}},
        {"simplify", {"simplify_fraction", {"a"}}},
        {"expand", {"expand_product", {"a"}}},
        {"subst", {"subst_eval", {"a", "var", "b"}}},
        {"deriv", {"derivative", {"a", "var"}}},
        {"sum", {"summation", {"i", "lo", "hi", "body"}}},
    };
    return table;
}

}  // namespace

SkeletonMatch classify_program(const Program& p) {
    if (auto loop = match_loop_sum(p)) return *loop;

    const auto* pr = std::get_if<PrintStmt>(&p.statements.back()->node);

    if (has_control_flow(p) || !pr) {
        SkeletonMatch m;
        m.skeleton_id = "straight_line";
        std::string listing = lang::render(p);
        while (!listing.empty() && listing.back() == '\n') listing.pop_back();
        m.slots["program_listing"] = listing;
        return m;
    }

    // print(v) with a defining assignment that is a single builtin call.
    if (const auto* v = std::get_if<VarRef>(&pr->value->node)) {
        std::size_t primary = 0;
        const AssignStmt* def = defining_assignment(p, v->name, &primary);
        if (def) {
            if (const auto* call = std::get_if<Call>(&def->value->node)) {
                if (call->name == "solve" && call->args.size() == 2) {
                    SkeletonMatch m;
                    m.skeleton_id = "solve";
                    std::vector<std::string> unknowns;
                    if (const auto* vars = std::get_if<ListLit>(&call->args[1]->node))
                        for (const auto& u : vars->items)
                            if (const auto* uv = std::get_if<VarRef>(&u->node))
                                unknowns.push_back(uv->name);
                    std::vector<std::string> conditions;
                    if (const auto* eqs = std::get_if<ListLit>(&call->args[0]->node))
                        for (const auto& eq : eqs->items) conditions.push_back(nl_rel(eq));
                    for (const auto& g : collect_givens(p, primary)) conditions.push_back(g);
                    m.slots["unknowns"] = join(unknowns, " and ");
                    m.slots["conditions"] = join(conditions, " and ");
                    m.unknown_names = std::move(unknowns);
                    m.condition_texts = std::move(conditions);
                    return m;
                }
                auto it = call_skeletons().find(call->name);
                if (it != call_skeletons().end() &&
                    call->args.size() == it->second.arg_slots.size()) {
                    SkeletonMatch m;
                    m.skeleton_id = it->second.id;
                    for (std::size_t i = 0; i < call->args.size(); ++i)
                        m.slots[it->second.arg_slots[i]] = lang::render_expr(call->args[i]);
                    m.givens = collect_givens(p, primary);
                    return m;
                }
            }
        }
    }

    // Catch-all: ask for the printed expression, listing the other
    // statements as side conditions.
    SkeletonMatch m;
    m.skeleton_id = "const_eval";
    m.slots["expr"] = lang::render_expr(pr->value);
    m.givens = collect_givens(p, p.statements.size() - 1);
    return m;
}

TemplateFile parse_template_file(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw std::runtime_error("template file is not a JSON object");
    TemplateFile f;
    try {
        f.version = j.at("version").get<std::string>();
        f.language = j.at("language").get<std::string>();
        f.answer_template = j.at("answer_template").get<std::string>();
        f.given_connector = j.at("given_connector").get<std::string>();
        f.and_connector = j.at("and_connector").get<std::string>();
        for (const auto& [id, entry] : j.at("skeletons").items()) {
            SkeletonTemplates st;
            st.question_template = entry.at("question_template").get<std::string>();
            for (const auto& s : entry.at("step_templates"))
                st.step_templates.push_back(s.get<std::string>());
            if (st.step_templates.empty())
                throw std::runtime_error("skeleton '" + id + "' has no step templates");
            f.skeletons[id] = std::move(st);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed template file: ") + e.what());
    }
    return f;
}

TemplateFile load_template_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open template file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_template_file(buf.str());
}

Question generate_question(const Program& p, const TranslationContext& ctx) {
    Question q;
    q.program_hash = p.source_hash;
    q.language = ctx.templates.language;

    if (ctx.generator.mode == gen::GeneratorMode::External) {
        gen::ExternalClient client(ctx.generator);
        const std::string prompt =
            gen::fill_prompt(gen::prompt_for(gen::PromptId::QuestionFromProgram),
                             {{"program", lang::render(p)}, {"language", q.language}});
        std::string text = client.complete(prompt);
        // Normalize surrounding whitespace only; the text is otherwise kept.
        while (!text.empty() && (text.back() == '\n' || text.back() == ' ' || text.back() == '\r'))
            text.pop_back();
        std::size_t start = text.find_first_not_of(" \n\r\t");
        q.text = start == std::string::npos ? "" : text.substr(start);
        if (q.text.empty()) throw TemplateMiss("external generator returned an empty question");
        return q;
    }

    const SkeletonMatch m = classify_program(p);
    auto it = ctx.templates.skeletons.find(m.skeleton_id);
    if (it == ctx.templates.skeletons.end())
        throw TemplateMiss("no template for skeleton '" + m.skeleton_id + "'");

    std::map<std::string, std::string> slots = m.slots;
    if (!m.unknown_names.empty())
        slots["unknowns"] = join(m.unknown_names, ctx.templates.and_connector);
    if (!m.condition_texts.empty())
        slots["conditions"] = join(m.condition_texts, ctx.templates.and_connector);
    slots["given_clause"] =
        m.givens.empty() ? ""
                         : ctx.templates.given_connector +
                               join(m.givens, ctx.templates.and_connector);
    q.text = fill_template(it->second.question_template, slots);
    return q;
}

std::vector<Solution> generate_solutions(const Program& p, const Question& q,
                                         const TranslationContext& ctx, int n_samples) {
    std::vector<Solution> out;
    if (ctx.generator.mode == gen::GeneratorMode::External) {
        gen::ExternalClient client(ctx.generator);
        const std::string prompt =
            gen::fill_prompt(gen::prompt_for(gen::PromptId::SolutionFromQuestion),
                             {{"question", q.text},
                              {"program", lang::render(p)},
                              {"language", q.language}});
        for (int i = 0; i < n_samples; ++i) {
            Solution s;
            s.text = client.complete(prompt);
            s.sample_index = i;
            s.program_hash = p.source_hash;
            out.push_back(std::move(s));
        }
        return out;
    }

    // Template mode: one deterministic solution derived from the execution
    // trace; n_samples only matters for External mode.
    (void)n_samples;
    const lang::ExecutionResult run = lang::execute(p, ctx.limits);
    if (run.status != lang::ExecStatus::Ok || !run.canonical_text) return out;

    auto skel = ctx.templates.skeletons.find(classify_program(p).skeleton_id);
    const std::vector<std::string> fallback = {"We work out {var} = {value}."};
    const std::vector<std::string>& steps =
        skel != ctx.templates.skeletons.end() && !skel->second.step_templates.empty()
            ? skel->second.step_templates
            : fallback;

    std::vector<std::string> lines;
    for (std::size_t k = 0; k < run.trace.size(); ++k) {
        const auto& tpl = steps[std::min(k, steps.size() - 1)];
        lines.push_back(fill_template(
            tpl, {{"index", std::to_string(k + 1)},
                  {"var", run.trace[k].var},
                  {"value", lang::canonicalize_value(run.trace[k].value)}}));
    }
    lines.push_back(fill_template(ctx.templates.answer_template,
                                  {{"answer", *run.canonical_text}}));
    Solution s;
    s.text = join(lines, "\n");
    s.sample_index = 0;
    s.program_hash = p.source_hash;
    out.push_back(std::move(s));
    return out;
}

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower_copy(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Splits on `sep` at nesting depth zero w.r.t. (), [], {}.
std::vector<std::string> split_top_level(const std::string& s, const std::string& sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size();) {
        const char c = s[i];
        if (c == '(' || c == '[' || c == '{') {
            ++depth;
            ++i;
        } else if (c == ')' || c == ']' || c == '}') {
            --depth;
            ++i;
        } else if (depth == 0 && s.compare(i, sep.size(), sep) == 0) {
            parts.push_back(s.substr(start, i - start));
            i += sep.size();
            start = i;
        } else {
            ++i;
        }
    }
    parts.push_back(s.substr(start));
    return parts;
}

std::optional<lang::Value> parse_decimal_text(const std::string& text) {
    // [+-]?digits[.digits][(e|E)[+-]digits], at least one of '.' or exponent.
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
    std::string int_part, frac_part, exp_part;
    bool saw_dot = false, saw_exp = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        int_part += text[i++];
    if (i < text.size() && text[i] == '.') {
        saw_dot = true;
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            frac_part += text[i++];
    }
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        saw_exp = true;
        ++i;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_part += text[i++];
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            exp_part += text[i++];
        if (exp_part.empty() || exp_part == "+" || exp_part == "-") return std::nullopt;
    }
    if (i != text.size()) return std::nullopt;
    if (!saw_dot && !saw_exp) return std::nullopt;
    if (int_part.empty() && frac_part.empty()) return std::nullopt;

    // Digit-by-digit accumulation: cpp_int's string constructor would read a
    // leading zero as an octal prefix.
    const auto digits_to_bigint = [](const std::string& digits) {
        lang::BigInt v = 0;
        for (const char c : digits) v = v * 10 + (c - '0');
        return v;
    };
    lang::Rational mant(digits_to_bigint(int_part));
    if (!frac_part.empty()) {
        lang::BigInt scale = 1;
        for (std::size_t k = 0; k < frac_part.size(); ++k) scale *= 10;
        mant = mant + lang::Rational(digits_to_bigint(frac_part), scale);
    }
    if (neg) mant = lang::Rational(0) - mant;
    if (saw_exp) {
        const long e = std::stol(exp_part);
        lang::BigInt p10 = 1;
        for (long k = 0; k < (e < 0 ? -e : e); ++k) p10 *= 10;
        mant = e >= 0 ? mant * lang::Rational(p10) : mant / lang::Rational(p10);
    }
    return lang::Value(lang::Decimal::from_rational(mant));
}

std::optional<lang::Value> parse_solution_set_text(const std::string& text);
std::optional<lang::Value> parse_list_text(const std::string& text);

std::optional<lang::Value> parse_expression_text(const std::string& text) {
    // Free identifiers become sym declarations so polynomials and surd
    // expressions read back through the DSL itself.
    std::set<std::string> names;
    for (std::size_t i = 0; i < text.size();) {
        const unsigned char c = text[i];
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i + 1;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            const std::string word = text.substr(i, j - i);
            if (!lang::is_builtin(word) && !lang::is_reserved_word(word))
                names.insert(word);
            i = j;
        } else {
            ++i;
        }
    }
    std::ostringstream src;
    if (!names.empty()) {
        src << "sym";
        for (const auto& n : names) src << " " << n;
        src << ";\n";
    }
    src << "print(" << text << ");\n";
    lang::Limits limits;
    limits.max_steps = 10000;
    limits.timeout_ms = 500;
    const lang::ExecutionResult run = lang::run_source(src.str(), limits);
    if (run.status != lang::ExecStatus::Ok || !run.output) return std::nullopt;
    return run.output;
}

std::optional<lang::Value> parse_value_text(const std::string& raw) {
    const std::string text = trim_copy(raw);
    if (text.empty()) return std::nullopt;
    if (text == "true") return lang::Value(true);
    if (text == "false") return lang::Value(false);
    if (text.front() == '{') return parse_solution_set_text(text);
    if (text.front() == '[') return parse_list_text(text);
    if (auto d = parse_decimal_text(text)) return d;
    return parse_expression_text(text);
}

std::optional<lang::Value> parse_solution_set_text(const std::string& text) {
    lang::SolutionSet set;
    for (const auto& alt_text : split_top_level(text, " | ")) {
        const std::string t = trim_copy(alt_text);
        if (t.size() < 2 || t.front() != '{' || t.back() != '}') return std::nullopt;
        const std::string inner = trim_copy(t.substr(1, t.size() - 2));
        lang::SolutionAlternative alt;
        if (!inner.empty()) {
            for (const auto& binding : split_top_level(inner, ",")) {
                const auto colon = binding.find(':');
                if (colon == std::string::npos) return std::nullopt;
                const std::string var = trim_copy(binding.substr(0, colon));
                if (var.empty()) return std::nullopt;
                auto val = parse_value_text(binding.substr(colon + 1));
                if (!val) return std::nullopt;
                alt.push_back(lang::SolutionBinding{var, *val});
            }
            std::sort(alt.begin(), alt.end(),
                      [](const lang::SolutionBinding& a, const lang::SolutionBinding& b) {
                          return a.var < b.var;
                      });
        } else if (split_top_level(text, " | ").size() > 1) {
            return std::nullopt;  // "{} | {x: 1}" is not a canonical set
        }
        if (!inner.empty()) set.alternatives.push_back(std::move(alt));
    }
    std::sort(set.alternatives.begin(), set.alternatives.end(),
              [](const lang::SolutionAlternative& a, const lang::SolutionAlternative& b) {
                  return lang::canonicalize_value(lang::Value(lang::SolutionSet{{a}})) <
                         lang::canonicalize_value(lang::Value(lang::SolutionSet{{b}}));
              });
    return lang::Value(std::move(set));
}

std::optional<lang::Value> parse_list_text(const std::string& text) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') return std::nullopt;
    const std::string inner = trim_copy(text.substr(1, text.size() - 2));
    lang::ValueList items;
    if (!inner.empty()) {
        for (const auto& item : split_top_level(inner, ",")) {
            auto v = parse_value_text(item);
            if (!v) return std::nullopt;
            items.push_back(*v);
        }
    }
    return lang::Value(std::move(items));
}

}  // namespace

std::optional<lang::Value> parse_answer_value(const std::string& text) {
    return parse_value_text(text);
}

std::optional<Answer> extract_answer(const Solution& s) {
    static const std::string kSentinel = "the answer is";
    const std::string lowered = lower_copy(s.text);
    std::size_t pos = std::string::npos;
    std::size_t search = 0;
    while (true) {
        const std::size_t hit = lowered.find(kSentinel, search);
        if (hit == std::string::npos) break;
        pos = hit;
        search = hit + kSentinel.size();
    }
    if (pos == std::string::npos) return std::nullopt;

    std::size_t i = pos + kSentinel.size();
    while (i < s.text.size() && s.text[i] == ' ') ++i;
    if (i < s.text.size() && s.text[i] == ':') ++i;
    const std::size_t eol = s.text.find('\n', i);
    const std::string tail =
        trim_copy(s.text.substr(i, eol == std::string::npos ? std::string::npos : eol - i));
    if (tail.empty()) return std::nullopt;

    Answer a;
    a.raw_text = tail;
    a.parsed = parse_answer_value(tail);
    return a;
}

}  // namespace mathforge::translation
