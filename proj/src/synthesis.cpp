#include "mathforge/synthesis.hpp"

#include "mathforge/parser.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace mathforge::synthesis {

using lang::ExprPtr;
using lang::make_binary;
using lang::make_call;
using lang::make_compare;
using lang::make_list;
using lang::make_number;
using lang::make_rational_literal;
using lang::make_stmt;
using lang::make_var;
using lang::Program;
using lang::StmtPtr;

namespace {

constexpr const char* kSourceKeys[] = {"knowledge", "seed", "mutant"};

const char* source_key(lang::ProvenanceKind kind) {
    return kSourceKeys[static_cast<int>(kind)];
}

// ---------------------------------------------------------------------------
// AST construction helpers shared by the skeleton builders.

ExprPtr lit(long v) {
    if (v < 0) return lang::make_unary('-', make_number(lang::BigInt(-v)));
    return make_number(lang::BigInt(v));
}

// coeff*var with the usual simplifications (1*x -> x, -1*x -> -x).
ExprPtr coeff_times(long coeff, const std::string& var) {
    if (coeff == 1) return make_var(var);
    if (coeff == -1) return lang::make_unary('-', make_var(var));
    return make_binary('*', lit(coeff), make_var(var));
}

// Appends `+ term` or `- |term|` to an existing expression.
ExprPtr plus_const(ExprPtr base, long c) {
    if (c == 0) return base;
    if (c > 0) return make_binary('+', std::move(base), lit(c));
    return make_binary('-', std::move(base), lit(-c));
}

ExprPtr plus_term(ExprPtr base, long coeff, const std::string& var) {
    if (coeff == 0) return base;
    if (coeff > 0) return make_binary('+', std::move(base), coeff_times(coeff, var));
    return make_binary('-', std::move(base), coeff_times(-coeff, var));
}

StmtPtr sym_stmt(std::vector<std::string> names) {
    return make_stmt(lang::SymStmt{std::move(names)});
}

StmtPtr assign(std::string name, ExprPtr value) {
    return make_stmt(lang::AssignStmt{std::move(name), std::move(value)});
}

StmtPtr print_stmt(ExprPtr value) {
    return make_stmt(lang::PrintStmt{std::move(value)});
}

Program finish(std::vector<StmtPtr> stmts) {
    Program p;
    p.statements = std::move(stmts);
    p.source = lang::render(p);
    lang::rehash(p);
    return p;
}

long nonzero(Rng& rng, long lo, long hi) {
    long v = 0;
    do {
        v = rng.range(lo, hi);
    } while (v == 0);
    return v;
}

// ---------------------------------------------------------------------------
// Skeleton builders.  Each returns a fully rendered + hashed Program that is
// guaranteed to execute with status Ok.

Program build_linear_solve(Rng& rng) {
    const std::string var(1, static_cast<char>('x' + rng.below(3)));  // x|y|z
    const long a = rng.below(3) == 0 ? 1 : nonzero(rng, -9, 9);
    const long b = nonzero(rng, -20, 20);
    const long c = rng.range(-20, 20);
    ExprPtr lhs = plus_const(coeff_times(a, var), b);
    std::vector<StmtPtr> stmts;
    stmts.push_back(sym_stmt({var}));
    stmts.push_back(assign(
        "s", make_call("solve", {make_list({make_compare("==", lhs, lit(c))}),
                                 make_list({make_var(var)})})));
    stmts.push_back(print_stmt(make_var("s")));
    return finish(std::move(stmts));
}

Program build_linear_system(Rng& rng) {
    long a1, b1, a2, b2;
    do {
        a1 = nonzero(rng, -6, 6);
        b1 = nonzero(rng, -6, 6);
        a2 = nonzero(rng, -6, 6);
        b2 = nonzero(rng, -6, 6);
    } while (a1 * b2 - a2 * b1 == 0);
    const long x0 = rng.range(-9, 9);
    const long y0 = rng.range(-9, 9);
    const long c1 = a1 * x0 + b1 * y0;
    const long c2 = a2 * x0 + b2 * y0;
    ExprPtr eq1 = make_compare("==", plus_term(coeff_times(a1, "x"), b1, "y"), lit(c1));
    ExprPtr eq2 = make_compare("==", plus_term(coeff_times(a2, "x"), b2, "y"), lit(c2));
    std::vector<StmtPtr> stmts;
    stmts.push_back(sym_stmt({"x", "y"}));
    stmts.push_back(assign("s", make_call("solve", {make_list({eq1, eq2}),
                                                    make_list({make_var("x"), make_var("y")})})));
    stmts.push_back(print_stmt(make_var("s")));
    return finish(std::move(stmts));
}

Program build_quadratic_solve(Rng& rng) {
    std::vector<StmtPtr> stmts;
    stmts.push_back(sym_stmt({"x"}));
    const ExprPtr x2 = make_binary('^', make_var("x"), lit(2));
    const int flavor = static_cast<int>(rng.below(3));
    if (flavor == 0) {
        // Integer roots r1, r2: x^2 - (r1+r2)x + r1*r2 == 0.
        const long r1 = rng.range(-9, 9);
        const long r2 = rng.range(-9, 9);
        ExprPtr lhs = plus_const(plus_term(x2, -(r1 + r2), "x"), r1 * r2);
        stmts.push_back(assign(
            "s", make_call("solve", {make_list({make_compare("==", lhs, lit(0))}),
                                     make_list({make_var("x")})})));
    } else {
        // x^2 == d, optionally with a sign constraint picking one root.
        static const long kRadicands[] = {2, 3, 5, 6, 7, 8, 10, 12, 18, 20};
        const long d = kRadicands[rng.below(std::size(kRadicands))];
        if (flavor == 2)
            stmts.push_back(make_stmt(lang::AssumeStmt{
                make_compare(">", make_var("x"), lit(0))}));
        stmts.push_back(assign(
            "s", make_call("solve", {make_list({make_compare("==", x2, lit(d))}),
                                     make_list({make_var("x")})})));
    }
    stmts.push_back(print_stmt(make_var("s")));
    return finish(std::move(stmts));
}

ExprPtr fraction(Rng& rng) {
    const long p = nonzero(rng, -30, 30);
    const long q = rng.range(2, 12);
    return make_binary('/', lit(p), lit(q));
}

Program build_const_eval(Rng& rng) {
    ExprPtr expr;
    switch (rng.below(4)) {
        case 0:
            expr = make_binary('+', fraction(rng), fraction(rng));
            break;
        case 1:
            expr = make_binary('-', fraction(rng), fraction(rng));
            break;
        case 2:
            expr = make_binary('*', make_binary('+', lit(rng.range(1, 20)), lit(rng.range(1, 20))),
                               lit(nonzero(rng, -9, 9)));
            break;
        default:
            expr = make_binary('+', make_binary('*', lit(rng.range(2, 12)), lit(rng.range(2, 12))),
                               fraction(rng));
            break;
    }
    return finish({print_stmt(expr)});
}

Program build_fraction_value(Rng& rng) {
    const long p = nonzero(rng, -99, 99);
    const long q = rng.range(2, 12);
    return finish({print_stmt(make_binary('/', lit(p), lit(q)))});
}

Program build_gcd_pair(Rng& rng) {
    const long g = rng.range(2, 24);
    const long a = g * rng.range(2, 20);
    const long b = g * rng.range(2, 20);
    return finish({assign("a", lit(a)), assign("b", lit(b)),
                   assign("g", make_call("gcd", {make_var("a"), make_var("b")})),
                   print_stmt(make_var("g"))});
}

Program build_lcm_pair(Rng& rng) {
    const long a = rng.range(2, 40);
    const long b = rng.range(2, 40);
    return finish({assign("a", lit(a)), assign("b", lit(b)),
                   assign("m", make_call("lcm", {make_var("a"), make_var("b")})),
                   print_stmt(make_var("m"))});
}

Program build_abs_diff(Rng& rng) {
    const long a = rng.range(-50, 99);
    const long b = rng.range(-50, 99);
    return finish({assign("d", make_call("abs", {make_binary('-', lit(a), lit(b))})),
                   print_stmt(make_var("d"))});
}

Program build_mod_pair(Rng& rng) {
    const long a = rng.range(10, 500);
    const long m = rng.range(2, 24);
    return finish({assign("r", make_call("mod", {lit(a), lit(m)})),
                   print_stmt(make_var("r"))});
}

Program build_floor_quotient(Rng& rng) {
    const long a = rng.range(10, 500);
    const long b = rng.range(2, 24);
    return finish({assign("q", make_call("floor", {make_binary('/', lit(a), lit(b))})),
                   print_stmt(make_var("q"))});
}

Program build_summation(Rng& rng) {
    const long lo = rng.range(0, 3);
    const long hi = lo + rng.range(3, 15);
    ExprPtr body;
    switch (rng.below(4)) {
        case 0: body = make_var("i"); break;
        case 1: body = make_binary('*', make_var("i"), make_var("i")); break;
        case 2: body = plus_const(coeff_times(2, "i"), 1); break;
        default:
            body = make_binary('*', make_var("i"), make_binary('+', make_var("i"), lit(1)));
            break;
    }
    return finish({assign("t", make_call("sum", {make_var("i"), lit(lo), lit(hi), body})),
                   print_stmt(make_var("t"))});
}

Program build_loop_sum(Rng& rng) {
    const long n = rng.range(4, 30);
    const bool squares = rng.coin();
    ExprPtr step = squares ? make_binary('*', make_var("i"), make_var("i"))
                           : ExprPtr(make_var("i"));
    lang::ForStmt loop;
    loop.var = "i";
    loop.from = 1;
    loop.to = n;
    loop.body.push_back(assign("t", make_binary('+', make_var("t"), step)));
    return finish({assign("t", lit(0)), make_stmt(std::move(loop)),
                   print_stmt(make_var("t"))});
}

Program build_derivative_eval(Rng& rng) {
    // f = [c3*x^3] + c2*x^2 + c1*x + c0 with small coefficients.
    const long c3 = rng.range(0, 4);
    const long c2 = nonzero(rng, -6, 6);
    const long c1 = nonzero(rng, -9, 9);
    const long c0 = rng.range(-9, 9);
    ExprPtr quad = c2 == 1 ? make_binary('^', make_var("x"), lit(2))
                           : make_binary('*', lit(c2 > 0 ? c2 : -c2),
                                         make_binary('^', make_var("x"), lit(2)));
    ExprPtr f;
    if (c3 != 0) {
        f = make_binary('*', lit(c3), make_binary('^', make_var("x"), lit(3)));
        f = make_binary(c2 > 0 ? '+' : '-', f, quad);
    } else {
        f = c2 > 0 ? quad : lang::make_unary('-', quad);
    }
    f = plus_term(f, c1, "x");
    f = plus_const(f, c0);
    const long a = rng.range(-5, 5);
    return finish({sym_stmt({"x"}), assign("f", f),
                   assign("g", make_call("deriv", {make_var("f"), make_var("x")})),
                   assign("v", make_call("subst", {make_var("g"), make_var("x"), lit(a)})),
                   print_stmt(make_var("v"))});
}

Program build_sqrt_eval(Rng& rng) {
    static const long kRadicands[] = {1, 2, 3, 5, 6, 7, 10, 13};
    const long k = rng.range(1, 12);
    const long d = kRadicands[rng.below(std::size(kRadicands))];
    return finish({print_stmt(make_call("sqrt", {lit(k * k * d)}))});
}

Program build_power_eval(Rng& rng) {
    ExprPtr base;
    long e;
    if (rng.coin()) {
        base = lit(nonzero(rng, -9, 9));
        e = rng.range(0, 6);
    } else {
        base = fraction(rng);
        e = rng.range(-3, 4);
    }
    return finish({print_stmt(make_call("pow", {base, lit(e)}))});
}

Program build_min_max(Rng& rng) {
    const std::string fn = rng.coin() ? "min" : "max";
    ExprPtr a = rng.coin() ? fraction(rng) : lit(rng.range(-30, 30));
    ExprPtr b = rng.coin() ? fraction(rng) : lit(rng.range(-30, 30));
    return finish({print_stmt(make_call(fn, {a, b}))});
}

Program build_evalf_eval(Rng& rng) {
    ExprPtr inner;
    if (rng.coin()) {
        static const long kNonSquares[] = {2, 3, 5, 6, 7, 8, 10, 11, 12, 13};
        inner = make_call("sqrt", {lit(kNonSquares[rng.below(std::size(kNonSquares))])});
    } else {
        static const long kDens[] = {3, 6, 7, 9, 11, 12};
        inner = make_binary('/', lit(nonzero(rng, -40, 40)),
                            lit(kDens[rng.below(std::size(kDens))]));
    }
    return finish({assign("v", make_call("evalf", {inner})), print_stmt(make_var("v"))});
}

Program build_expand_product(Rng& rng) {
    const long a = nonzero(rng, -9, 9);
    const long b = nonzero(rng, -9, 9);
    ExprPtr fa = plus_const(make_var("x"), a);
    ExprPtr prod = rng.below(4) == 0
                       ? make_binary('^', fa, lit(2))
                       : make_binary('*', fa, plus_const(make_var("x"), b));
    return finish({sym_stmt({"x"}), assign("p", make_call("expand", {prod})),
                   print_stmt(make_var("p"))});
}

Program build_subst_eval(Rng& rng) {
    const long a = nonzero(rng, -9, 9);
    const long b = rng.range(-9, 9);
    const long c = rng.range(-6, 6);
    ExprPtr poly = plus_const(plus_term(make_binary('^', make_var("x"), lit(2)), a, "x"), b);
    return finish({sym_stmt({"x"}), assign("p", poly),
                   assign("v", make_call("subst", {make_var("p"), make_var("x"), lit(c)})),
                   print_stmt(make_var("v"))});
}

Program build_simplify_fraction(Rng& rng) {
    const long g = rng.range(2, 18);
    const long p = g * nonzero(rng, -12, 12);
    const long q = g * rng.range(2, 12);
    return finish({assign("v", make_call("simplify", {make_binary('/', lit(p), lit(q))})),
                   print_stmt(make_var("v"))});
}

std::vector<Skeleton> build_registry() {
    std::vector<Skeleton> out;
    auto add = [&out](std::string id, std::set<std::string> tools,
                      Program (*fn)(Rng&)) {
        out.push_back(Skeleton{std::move(id), std::move(tools), fn});
    };
    add("linear_solve", {"solve"}, build_linear_solve);
    add("linear_system", {"solve"}, build_linear_system);
    add("quadratic_solve", {"solve"}, build_quadratic_solve);
    add("const_eval", {}, build_const_eval);
    add("fraction_value", {}, build_fraction_value);
    add("gcd_pair", {"gcd"}, build_gcd_pair);
    add("lcm_pair", {"lcm"}, build_lcm_pair);
    add("abs_diff", {"abs"}, build_abs_diff);
    add("mod_pair", {"mod"}, build_mod_pair);
    add("floor_quotient", {"floor"}, build_floor_quotient);
    add("summation", {"sum"}, build_summation);
    add("loop_sum", {}, build_loop_sum);
    add("derivative_eval", {"deriv", "subst"}, build_derivative_eval);
    add("sqrt_eval", {"sqrt"}, build_sqrt_eval);
    add("power_eval", {"pow"}, build_power_eval);
    add("min_max", {"min", "max"}, build_min_max);
    add("evalf_eval", {"evalf", "sqrt"}, build_evalf_eval);
    add("expand_product", {"expand"}, build_expand_product);
    add("subst_eval", {"subst"}, build_subst_eval);
    add("simplify_fraction", {"simplify"}, build_simplify_fraction);
    return out;
}

std::set<std::string> combo_toolkit(const knowledge::KnowledgeSystem& ks,
                                    const knowledge::TopicCombo& combo) {
    std::set<std::string> tools;
    for (const auto& id : combo.topics) {
        auto it = ks.topic_tools.find(id);
        if (it == ks.topic_tools.end()) continue;
        tools.insert(it->second.begin(), it->second.end());
    }
    return tools;
}

bool runs_ok(const Program& p, const lang::Limits& limits) {
    return lang::execute(p, limits).status == lang::ExecStatus::Ok;
}

// Parse + execute a completion from the external generator; nullopt on any
// failure so the caller can drop it.
std::optional<Program> adopt_external(const std::string& completion,
                                      const lang::Limits& limits) {
    auto block = gen::first_fenced_block(completion);
    const std::string source = block ? *block : completion;
    try {
        Program p = lang::parse(source);
        if (!runs_ok(p, limits)) return std::nullopt;
        return p;
    } catch (const lang::ParseError&) {
        return std::nullopt;
    }
}

std::string topics_blurb(const knowledge::KnowledgeSystem& ks,
                         const knowledge::TopicCombo& combo) {
    std::ostringstream os;
    bool first = true;
    for (const auto& id : combo.topics) {
        const auto* t = ks.find(id);
        if (!t) continue;
        if (!first) os << "; ";
        first = false;
        os << knowledge::stage_name(t->stage) << " / " << t->subject << " / " << t->topic;
    }
    return os.str();
}

}  // namespace

bool ProgramSet::insert(Program p) {
    auto it = std::lower_bound(programs.begin(), programs.end(), p.source_hash,
                               [](const Program& lhs, const std::string& h) {
                                   return lhs.source_hash < h;
                               });
    if (it != programs.end() && it->source_hash == p.source_hash) return false;
    source_counts[source_key(p.provenance.kind)] += 1;
    programs.insert(it, std::move(p));
    return true;
}

bool ProgramSet::contains(const std::string& source_hash) const {
    return find(source_hash) != nullptr;
}

const Program* ProgramSet::find(const std::string& source_hash) const {
    auto it = std::lower_bound(programs.begin(), programs.end(), source_hash,
                               [](const Program& lhs, const std::string& h) {
                                   return lhs.source_hash < h;
                               });
    if (it != programs.end() && it->source_hash == source_hash) return &*it;
    return nullptr;
}

std::vector<SeedQuestion> load_seed_questions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open seed file: " + path);
    std::vector<SeedQuestion> seeds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("text"))
            throw std::runtime_error("bad seed record at " + path + ":" +
                                     std::to_string(line_no));
        SeedQuestion s;
        s.id = j["id"].get<std::string>();
        s.text = j["text"].get<std::string>();
        if (j.contains("language")) s.language = j["language"].get<std::string>();
        seeds.push_back(std::move(s));
    }
    return seeds;
}

const std::vector<Skeleton>& skeleton_registry() {
    static const std::vector<Skeleton> registry = build_registry();
    return registry;
}

std::vector<const Skeleton*> eligible_skeletons(const std::set<std::string>& tools) {
    std::vector<const Skeleton*> out;
    for (const auto& sk : skeleton_registry()) {
        if (std::includes(tools.begin(), tools.end(), sk.required_tools.begin(),
                          sk.required_tools.end()))
            out.push_back(&sk);
    }
    return out;
}

ProgramSet synthesize_from_knowledge(const knowledge::KnowledgeSystem& ks,
                                     const gen::GeneratorConfig& cfg,
                                     std::size_t count, Rng& rng,
                                     const lang::Limits& limits) {
    ProgramSet set;
    std::unique_ptr<gen::ExternalClient> client;
    if (cfg.mode == gen::GeneratorMode::External)
        client = std::make_unique<gen::ExternalClient>(cfg);

    for (std::size_t i = 0; i < count; ++i) {
        // A handful of fresh attempts per slot lets us skip hash collisions
        // without perturbing any other slot's randomness.
        for (std::uint64_t attempt = 0; attempt < 4; ++attempt) {
            Rng item_rng(derive_seed(rng.seed(), std::uint64_t(i) * 16 + attempt));
            knowledge::TopicCombo combo = knowledge::sample_topic_combination(ks, item_rng);
            const std::set<std::string> tools = combo_toolkit(ks, combo);

            std::optional<Program> made;
            if (cfg.mode == gen::GeneratorMode::Template) {
                auto eligible = eligible_skeletons(tools);
                if (eligible.empty()) break;  // no toolless skeletons? cannot happen
                const Skeleton* sk = eligible[item_rng.below(eligible.size())];
                made = sk->build(item_rng);
            } else {
                std::ostringstream toolss;
                bool first = true;
                for (const auto& t : tools) {
                    if (!first) toolss << ", ";
                    first = false;
                    toolss << t;
                }
                const std::string prompt =
                    gen::fill_prompt(gen::prompt_for(gen::PromptId::ProgramFromTopics),
                                     {{"topics", topics_blurb(ks, combo)},
                                      {"tools", toolss.str()}});
                made = adopt_external(client->complete(prompt), limits);
                if (made) {
                    // Enforce the tool-eligibility invariant on model output.
                    const auto used = lang::collect_builtin_calls(*made);
                    if (!std::includes(tools.begin(), tools.end(), used.begin(), used.end()))
                        made.reset();
                }
            }
            if (!made) continue;
            if (!runs_ok(*made, limits)) continue;
            made->provenance.kind = lang::ProvenanceKind::Knowledge;
            made->provenance.topic_ids = combo.topics;
            if (set.insert(std::move(*made))) break;
        }
    }
    return set;
}

ProgramSet synthesize_from_seeds(const std::vector<SeedQuestion>& seeds,
                                 const gen::GeneratorConfig& cfg, Rng& rng,
                                 const lang::Limits& limits) {
    (void)rng;  // template matching is deterministic; kept for signature parity
    ProgramSet set;
    std::unique_ptr<gen::ExternalClient> client;
    if (cfg.mode == gen::GeneratorMode::External)
        client = std::make_unique<gen::ExternalClient>(cfg);

    for (const auto& seed : seeds) {
        std::optional<Program> made;
        if (cfg.mode == gen::GeneratorMode::Template) {
            made = program_from_seed_template(seed, limits);
        } else {
            const std::string prompt =
                gen::fill_prompt(gen::prompt_for(gen::PromptId::ProgramFromSeed),
                                 {{"seed_question", seed.text}});
            made = adopt_external(client->complete(prompt), limits);
        }
        if (!made) continue;
        made->provenance.kind = lang::ProvenanceKind::Seed;
        made->provenance.seed_id = seed.id;
        set.insert(std::move(*made));
    }
    return set;
}

ProgramSet merge_program_sets(const ProgramSet& a, const ProgramSet& b) {
    ProgramSet merged;
    for (const auto& p : a.programs) merged.insert(p);
    for (const auto& p : b.programs) merged.insert(p);
    return merged;
}

namespace {

// Strips one trailing terminator (., ?, 。, ？) plus surrounding whitespace.
std::string trim_question(std::string s) {
    auto drop_ws = [](std::string& t) {
        while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r'))
            t.pop_back();
        std::size_t i = t.find_first_not_of(" \t\r");
        t = i == std::string::npos ? "" : t.substr(i);
    };
    drop_ws(s);
    static const std::vector<std::string> kTerminators = {".", "?", "。", "？"};
    for (const auto& term : kTerminators) {
        if (s.size() >= term.size() && s.compare(s.size() - term.size(), term.size(), term) == 0) {
            s.erase(s.size() - term.size());
            break;
        }
    }
    drop_ws(s);
    return s;
}

std::optional<Program> try_sources(const std::vector<std::string>& sources,
                                   const lang::Limits& limits) {
    for (const auto& src : sources) {
        try {
            Program p = lang::parse(src);
            if (runs_ok(p, limits)) return p;
        } catch (const lang::ParseError&) {
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Program> program_from_seed_template(const SeedQuestion& seed,
                                                  const lang::Limits& limits) {
    const std::string text = trim_question(seed.text);

    // "Solve <lhs> = <rhs> for <var>"
    static const std::regex solve_re(R"(^Solve\s+(.+?)\s*=\s*(.+?)\s+for\s+([A-Za-z][A-Za-z0-9_]*)$)",
                                     std::regex::icase);
    std::smatch m;
    if (std::regex_match(text, m, solve_re)) {
        const std::string var = m[3].str();
        std::ostringstream src;
        src << "sym " << var << ";\n"
            << "s = solve([" << m[1].str() << " == " << m[2].str() << "], [" << var
            << "]);\n"
            << "print(s);\n";
        return try_sources({src.str()}, limits);
    }

    // Expression-style phrasings; extract the expression text.
    std::string expr;
    static const std::regex what_re(R"(^(?:What\s+is(?:\s+the\s+value\s+of)?|Compute|Evaluate)\s+(.+)$)",
                                    std::regex::icase);
    if (std::regex_match(text, m, what_re)) {
        expr = m[1].str();
    } else {
        // zh: 计算 <expr> / 求 <expr> 的值
        static const std::regex calc_zh("^计算\\s*(.+)$");
        static const std::regex  val_zh("^求\\s*(.+?)\\s*的值$");
        if (std::regex_match(text, m, val_zh) || std::regex_match(text, m, calc_zh))
            expr = m[1].str();
    }
    if (expr.empty()) return std::nullopt;
    return try_sources({"print(" + expr + ");\n"}, limits);
}

}  // namespace mathforge::synthesis
