#include "mathforge/pipeline.hpp"

#include "mathforge/parser.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace mathforge::pipeline {

using json = nlohmann::ordered_json;
using corpus::IoError;

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// File helpers.

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> read_jsonl_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open file for writing: " + tmp);
        out << content;
        if (!out) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename " + tmp + " to " + path);
}

// ---------------------------------------------------------------------------
// Deterministic worker pool: results land at their input index, so output
// order never depends on scheduling.  The callable receives (item, index)
// and must not touch shared mutable state.

template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& items, int jobs, Fn fn) {
    using Out = std::invoke_result_t<Fn, const In&, std::size_t>;
    std::vector<Out> out(items.size());
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)),
                                                       items.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i], i);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (first_error) return;
            }
            try {
                out[i] = fn(items[i], i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

// ---------------------------------------------------------------------------
// Config parsing.

void require_keys(const json& obj, const std::string& where,
                  const std::vector<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) throw ConfigError("'" + key + "' must be a string");
    return obj[key].get<std::string>();
}

long get_integer(const json& obj, const std::string& key, long fallback, long min_value) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    const long v = obj[key].get<long>();
    if (v < min_value)
        throw ConfigError("'" + key + "' must be >= " + std::to_string(min_value));
    return v;
}

gen::GeneratorConfig parse_generator(const json& obj) {
    gen::GeneratorConfig g;
    if (!obj.is_object()) throw ConfigError("'generator' must be an object");
    require_keys(obj, "generator", {"mode", "endpoint", "model_name", "max_retries", "timeout_ms"});
    const std::string mode = get_string(obj, "mode", "template");
    if (mode == "template")
        g.mode = gen::GeneratorMode::Template;
    else if (mode == "external")
        g.mode = gen::GeneratorMode::External;
    else
        throw ConfigError("generator.mode must be 'template' or 'external'");
    g.endpoint = get_string(obj, "endpoint", "");
    g.model_name = get_string(obj, "model_name", g.model_name);
    g.max_retries = static_cast<int>(get_integer(obj, "max_retries", g.max_retries, 0));
    g.timeout_ms = static_cast<int>(get_integer(obj, "timeout_ms", g.timeout_ms, 1));
    if (g.mode == gen::GeneratorMode::External && g.endpoint.empty())
        throw ConfigError("generator.endpoint is required in external mode");
    return g;
}

lang::Limits parse_limits(const json& obj) {
    lang::Limits limits;
    if (!obj.is_object()) throw ConfigError("'limits' must be an object");
    require_keys(obj, "limits", {"max_steps", "max_nodes", "timeout_ms"});
    limits.max_steps = get_integer(obj, "max_steps", limits.max_steps, 1);
    limits.max_nodes = static_cast<std::size_t>(
        get_integer(obj, "max_nodes", static_cast<long>(limits.max_nodes), 1));
    limits.timeout_ms = get_integer(obj, "timeout_ms", limits.timeout_ms, 1);
    return limits;
}

std::string resolve_against(const fs::path& base, const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (base / p).lexically_normal().string();
}

// ---------------------------------------------------------------------------
// Provenance <-> JSON.

std::string provenance_kind_name(lang::ProvenanceKind k) {
    switch (k) {
    case lang::ProvenanceKind::Knowledge: return "knowledge";
    case lang::ProvenanceKind::Seed: return "seed";
    case lang::ProvenanceKind::Mutant: return "mutant";
    }
    return "knowledge";
}

lang::ProvenanceKind provenance_kind_from_name(const std::string& name) {
    if (name == "knowledge") return lang::ProvenanceKind::Knowledge;
    if (name == "seed") return lang::ProvenanceKind::Seed;
    if (name == "mutant") return lang::ProvenanceKind::Mutant;
    throw IoError("unknown provenance kind: " + name);
}

json trace_to_json(const std::vector<lang::MutationRecord>& trace) {
    json arr = json::array();
    for (const auto& m : trace) {
        json rec;
        rec["kind"] = m.kind;
        rec["site"] = m.site;
        rec["before"] = m.before;
        rec["after"] = m.after;
        rec["iteration"] = m.iteration;
        arr.push_back(std::move(rec));
    }
    return arr;
}

std::vector<lang::MutationRecord> trace_from_json(const json& arr) {
    std::vector<lang::MutationRecord> trace;
    for (const auto& rec : arr) {
        lang::MutationRecord m;
        m.kind = rec.at("kind").get<std::string>();
        m.site = rec.at("site").get<std::string>();
        m.before = rec.at("before").get<std::string>();
        m.after = rec.at("after").get<std::string>();
        m.iteration = rec.at("iteration").get<int>();
        trace.push_back(std::move(m));
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Report persistence: report.json carries the most recent report of every
// stage that has run, in pipeline order.

const std::vector<StageKind>& stage_order() {
    static const std::vector<StageKind> order = {
        StageKind::Synthesize,   StageKind::Mutate, StageKind::Translate,
        StageKind::Verify,       StageKind::Decontaminate,
        StageKind::Export,
    };
    return order;
}

std::optional<StageKind> stage_kind_from_name(const std::string& name) {
    for (const StageKind s : stage_order())
        if (stage_kind_name(s) == name) return s;
    return std::nullopt;
}

std::map<StageKind, StageReport> read_report_map(const std::string& path) {
    std::map<StageKind, StageReport> reports;
    std::ifstream in(path, std::ios::binary);
    if (!in) return reports;
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
        for (const auto& entry : doc.at("stages"))
            if (auto kind = stage_kind_from_name(entry.at("stage").get<std::string>())) {
                const StageReport r = stage_report_from_json(entry.dump());
                reports[*kind] = r;
            }
    } catch (const std::exception&) {
        return {};  // a damaged report file is rebuilt from scratch
    }
    return reports;
}

void write_report_map(const std::string& path, const std::map<StageKind, StageReport>& reports) {
    json doc;
    doc["stages"] = json::array();
    for (const StageKind s : stage_order()) {
        const auto it = reports.find(s);
        if (it != reports.end()) doc["stages"].push_back(json::parse(stage_report_to_json(it->second)));
    }
    write_file_atomic(path, doc.dump(2) + "\n");
}

void merge_report(const PipelineConfig& cfg, const StageReport& report) {
    const std::string path = artifact_path(cfg, kReportFile);
    auto reports = read_report_map(path);
    reports[report.stage] = report;
    write_report_map(path, reports);
}

class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    long elapsed_ms() const {
        const auto now = std::chrono::steady_clock::now();
        return static_cast<long>(
            std::chrono::duration_cast<std::chrono::milliseconds>(now - start_).count());
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Shared stage plumbing.

void ensure_output_dir(const PipelineConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output_dir + ": " + ec.message());
}

std::vector<std::string> capped(std::vector<std::string> lines, const StageOptions& opts) {
    if (opts.limit && lines.size() > *opts.limit) lines.resize(*opts.limit);
    return lines;
}

translation::TranslationContext make_translation_context(const PipelineConfig& cfg) {
    translation::TranslationContext ctx;
    ctx.generator = cfg.generator;
    ctx.limits = cfg.limits;
    if (!cfg.template_path.empty()) {
        try {
            ctx.templates = translation::load_template_file(cfg.template_path);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        if (ctx.templates.language != cfg.language)
            throw ConfigError("template file language '" + ctx.templates.language +
                              "' does not match configured language '" + cfg.language + "'");
    }
    return ctx;
}

std::string record_template_version(const PipelineConfig& cfg,
                                    const translation::TranslationContext& ctx) {
    return cfg.generator.mode == gen::GeneratorMode::Template ? ctx.templates.version
                                                              : cfg.generator.model_name;
}

std::vector<lang::Program> load_programs(const std::string& path, const StageOptions& opts) {
    std::vector<lang::Program> programs;
    for (const std::string& line : capped(read_jsonl_lines(path), opts))
        programs.push_back(program_from_json(line));
    return programs;
}

std::vector<corpus::CorpusRecord> load_records(const std::string& path, const StageOptions& opts) {
    std::vector<corpus::CorpusRecord> records;
    for (const std::string& line : capped(read_jsonl_lines(path), opts))
        records.push_back(corpus::record_from_json(line));
    return records;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config.

PipelineConfig parse_pipeline_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    require_keys(doc, "config",
                 {"knowledge_path", "seed_questions_path", "template_path", "generator",
                  "n_knowledge_programs", "mutation_k", "n_solution_samples", "limits",
                  "test_set_paths", "language", "global_seed", "jobs", "output_dir",
                  "created_at", "emit_mutation_log"});

    PipelineConfig cfg;
    cfg.knowledge_path = get_string(doc, "knowledge_path", "");
    cfg.seed_questions_path = get_string(doc, "seed_questions_path", "");
    cfg.template_path = get_string(doc, "template_path", "");
    if (doc.contains("generator")) cfg.generator = parse_generator(doc["generator"]);
    cfg.n_knowledge_programs =
        static_cast<std::size_t>(get_integer(doc, "n_knowledge_programs", 0, 0));
    cfg.mutation_k = static_cast<int>(get_integer(doc, "mutation_k", 0, 0));
    cfg.n_solution_samples = static_cast<int>(get_integer(doc, "n_solution_samples", 1, 1));
    if (doc.contains("limits")) cfg.limits = parse_limits(doc["limits"]);
    if (doc.contains("test_set_paths")) {
        if (!doc["test_set_paths"].is_array())
            throw ConfigError("'test_set_paths' must be an array of strings");
        for (const auto& p : doc["test_set_paths"]) {
            if (!p.is_string()) throw ConfigError("'test_set_paths' must be an array of strings");
            cfg.test_set_paths.push_back(p.get<std::string>());
        }
    }
    cfg.language = get_string(doc, "language", cfg.language);
    if (doc.contains("global_seed")) {
        if (!doc["global_seed"].is_number_integer() ||
            (doc["global_seed"].is_number_integer() && !doc["global_seed"].is_number_unsigned() &&
             doc["global_seed"].get<long long>() < 0))
            throw ConfigError("'global_seed' must be a non-negative integer");
        cfg.global_seed = doc["global_seed"].get<std::uint64_t>();
    }
    cfg.jobs = static_cast<int>(get_integer(doc, "jobs", 1, 1));
    cfg.output_dir = get_string(doc, "output_dir", "");
    cfg.created_at = get_string(doc, "created_at", cfg.created_at);
    if (doc.contains("emit_mutation_log")) {
        if (!doc["emit_mutation_log"].is_boolean())
            throw ConfigError("'emit_mutation_log' must be a boolean");
        cfg.emit_mutation_log = doc["emit_mutation_log"].get<bool>();
    }

    if (cfg.knowledge_path.empty()) throw ConfigError("'knowledge_path' is required");
    if (cfg.output_dir.empty()) throw ConfigError("'output_dir' is required");
    if (cfg.language.empty()) throw ConfigError("'language' must not be empty");
    if (cfg.generator.mode == gen::GeneratorMode::Template && cfg.template_path.empty())
        throw ConfigError("'template_path' is required in template mode");
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    PipelineConfig cfg = parse_pipeline_config(buf.str());

    const fs::path base = fs::path(path).parent_path();
    cfg.knowledge_path = resolve_against(base, cfg.knowledge_path);
    cfg.seed_questions_path = resolve_against(base, cfg.seed_questions_path);
    cfg.template_path = resolve_against(base, cfg.template_path);
    for (auto& p : cfg.test_set_paths) p = resolve_against(base, p);
    return cfg;
}

// ---------------------------------------------------------------------------
// Reports.

std::string stage_kind_name(StageKind s) {
    switch (s) {
    case StageKind::Synthesize: return "Synthesize";
    case StageKind::Mutate: return "Mutate";
    case StageKind::Translate: return "Translate";
    case StageKind::Verify: return "Verify";
    case StageKind::Decontaminate: return "Decontaminate";
    case StageKind::Export: return "Export";
    }
    return "Synthesize";
}

std::string stage_report_to_json(const StageReport& r) {
    json doc;
    doc["stage"] = stage_kind_name(r.stage);
    doc["input_count"] = r.input_count;
    doc["output_count"] = r.output_count;
    doc["dropped_by_reason"] = json::object();
    for (const auto& [reason, count] : r.dropped_by_reason)
        doc["dropped_by_reason"][reason] = count;
    doc["wall_ms"] = r.wall_ms;
    return doc.dump();
}

StageReport stage_report_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        StageReport r;
        const auto kind = stage_kind_from_name(doc.at("stage").get<std::string>());
        if (!kind) throw IoError("unknown stage name in report");
        r.stage = *kind;
        r.input_count = doc.at("input_count").get<std::size_t>();
        r.output_count = doc.at("output_count").get<std::size_t>();
        for (const auto& [reason, count] : doc.at("dropped_by_reason").items())
            r.dropped_by_reason[reason] = count.get<std::size_t>();
        r.wall_ms = doc.at("wall_ms").get<long>();
        return r;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed stage report: ") + e.what());
    }
}

std::string artifact_path(const PipelineConfig& cfg, const char* name) {
    return (fs::path(cfg.output_dir) / name).string();
}

// ---------------------------------------------------------------------------
// Intermediate serializers.

std::string program_to_json(const lang::Program& p) {
    json doc;
    doc["hash"] = p.source_hash;
    doc["source"] = p.source;
    json prov;
    prov["kind"] = provenance_kind_name(p.provenance.kind);
    prov["topic_ids"] = p.provenance.topic_ids;
    prov["seed_id"] = p.provenance.seed_id;
    prov["parent_hash"] = p.provenance.parent_hash;
    doc["provenance"] = std::move(prov);
    doc["mutation_trace"] = trace_to_json(p.mutation_trace);
    return doc.dump();
}

lang::Program program_from_json(const std::string& line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed program line: ") + e.what());
    }
    try {
        lang::Program p = lang::parse(doc.at("source").get<std::string>());
        const auto& prov = doc.at("provenance");
        p.provenance.kind = provenance_kind_from_name(prov.at("kind").get<std::string>());
        p.provenance.topic_ids = prov.at("topic_ids").get<std::vector<std::string>>();
        p.provenance.seed_id = prov.at("seed_id").get<std::string>();
        p.provenance.parent_hash = prov.at("parent_hash").get<std::string>();
        p.mutation_trace = trace_from_json(doc.at("mutation_trace"));
        if (p.source_hash != doc.at("hash").get<std::string>())
            throw IoError("program hash mismatch (stored artifact was modified)");
        return p;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed program line: ") + e.what());
    } catch (const lang::ParseError& e) {
        throw IoError(std::string("stored program no longer parses: ") + e.what());
    }
}

std::string candidate_to_json(const Candidate& c) {
    json doc;
    doc["program"] = json::parse(program_to_json(c.program));
    doc["question"] = {{"text", c.question.text}, {"language", c.question.language}};
    doc["solution"] = {{"text", c.solution.text}, {"sample_index", c.solution.sample_index}};
    return doc.dump();
}

Candidate candidate_from_json(const std::string& line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed candidate line: ") + e.what());
    }
    try {
        Candidate c;
        c.program = program_from_json(doc.at("program").dump());
        c.question.text = doc.at("question").at("text").get<std::string>();
        c.question.language = doc.at("question").at("language").get<std::string>();
        c.question.program_hash = c.program.source_hash;
        c.solution.text = doc.at("solution").at("text").get<std::string>();
        c.solution.sample_index = doc.at("solution").at("sample_index").get<int>();
        c.solution.program_hash = c.program.source_hash;
        return c;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed candidate line: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Stages.

StageReport run_synthesize(const PipelineConfig& cfg, const StageOptions& opts) {
    StageTimer timer;
    ensure_output_dir(cfg);

    knowledge::KnowledgeSystem ks;
    try {
        ks = knowledge::load_knowledge_system(cfg.knowledge_path);
    } catch (const knowledge::KnowledgeError& e) {
        throw ConfigError(std::string("knowledge system: ") + e.what());
    }
    std::vector<synthesis::SeedQuestion> seeds;
    if (!cfg.seed_questions_path.empty()) {
        try {
            seeds = synthesis::load_seed_questions(cfg.seed_questions_path);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("seed questions: ") + e.what());
        }
    }

    std::size_t slot_count = cfg.n_knowledge_programs;
    if (opts.limit) {
        slot_count = std::min(slot_count, *opts.limit);
        if (seeds.size() > *opts.limit) seeds.resize(*opts.limit);
    }

    Rng knowledge_rng(cfg.global_seed);
    const synthesis::ProgramSet from_knowledge = synthesis::synthesize_from_knowledge(
        ks, cfg.generator, slot_count, knowledge_rng, cfg.limits);
    Rng seed_rng(derive_seed(cfg.global_seed, "seed-questions"));
    const synthesis::ProgramSet from_seeds =
        synthesis::synthesize_from_seeds(seeds, cfg.generator, seed_rng, cfg.limits);
    const synthesis::ProgramSet merged = synthesis::merge_program_sets(from_knowledge, from_seeds);

    std::string out;
    for (const auto& p : merged.programs) out += program_to_json(p) + "\n";
    write_file_atomic(artifact_path(cfg, kProgramsFile), out);

    StageReport report;
    report.stage = StageKind::Synthesize;
    report.input_count = slot_count + seeds.size();
    report.output_count = merged.size();
    const std::size_t slot_failures = slot_count - from_knowledge.size();
    const std::size_t seed_failures = seeds.size() - from_seeds.size();
    const std::size_t cross_duplicates = from_knowledge.size() + from_seeds.size() - merged.size();
    if (slot_failures) report.dropped_by_reason["knowledge_slot_failed"] = slot_failures;
    if (seed_failures) report.dropped_by_reason["seed_unmatched"] = seed_failures;
    if (cross_duplicates) report.dropped_by_reason["duplicate"] = cross_duplicates;
    report.wall_ms = timer.elapsed_ms();
    merge_report(cfg, report);
    return report;
}

StageReport run_mutate(const PipelineConfig& cfg, const StageOptions& opts) {
    StageTimer timer;
    ensure_output_dir(cfg);

    const std::vector<lang::Program> parents =
        load_programs(artifact_path(cfg, kProgramsFile), opts);

    const auto mutant_batches = parallel_map(
        parents, cfg.jobs,
        [&](const lang::Program& parent, std::size_t) -> std::vector<mutation::MutantCandidate> {
            Rng rng(derive_seed(cfg.global_seed, "mutate:" + parent.source_hash));
            return mutation::mutate_iteratively(parent, cfg.mutation_k, rng, cfg.limits);
        });

    synthesis::ProgramSet originals;
    for (const auto& p : parents) originals.insert(p);
    std::vector<mutation::MutantCandidate> mutants;
    for (const auto& batch : mutant_batches)
        mutants.insert(mutants.end(), batch.begin(), batch.end());
    const synthesis::ProgramSet final_set = mutation::build_final_program_set(originals, mutants);

    std::string out;
    for (const auto& p : final_set.programs) out += program_to_json(p) + "\n";
    write_file_atomic(artifact_path(cfg, kProgramsFinalFile), out);

    if (opts.emit_mutation_log || cfg.emit_mutation_log) {
        std::string log;
        for (const auto& batch : mutant_batches)
            for (const auto& m : batch) {
                json entry;
                entry["program_hash"] = m.program.source_hash;
                entry["parent_hash"] = m.program.provenance.parent_hash;
                entry["parent_output"] = m.parent_output;
                entry["own_output"] = m.own_output;
                entry["trace"] = trace_to_json(m.program.mutation_trace);
                log += entry.dump() + "\n";
            }
        write_file_atomic(artifact_path(cfg, kMutationLogFile), log);
    }

    StageReport report;
    report.stage = StageKind::Mutate;
    report.input_count = parents.size();
    report.output_count = final_set.size();
    const std::size_t collisions = parents.size() + mutants.size() - final_set.size();
    if (collisions) report.dropped_by_reason["duplicate"] = collisions;
    report.wall_ms = timer.elapsed_ms();
    merge_report(cfg, report);
    return report;
}

StageReport run_translate(const PipelineConfig& cfg, const StageOptions& opts) {
    StageTimer timer;
    ensure_output_dir(cfg);

    const translation::TranslationContext ctx = make_translation_context(cfg);
    const std::vector<lang::Program> programs =
        load_programs(artifact_path(cfg, kProgramsFinalFile), opts);

    struct Outcome {
        std::vector<Candidate> candidates;
        std::string drop_reason;  // empty on success
    };
    const auto outcomes = parallel_map(
        programs, cfg.jobs, [&](const lang::Program& p, std::size_t) -> Outcome {
            Outcome o;
            try {
                const translation::Question q = translation::generate_question(p, ctx);
                const std::vector<translation::Solution> sols =
                    translation::generate_solutions(p, q, ctx, cfg.n_solution_samples);
                if (sols.empty()) {
                    o.drop_reason = "no_solution";
                    return o;
                }
                for (const auto& s : sols) o.candidates.push_back({p, q, s});
            } catch (const translation::TemplateMiss&) {
                o.drop_reason = "template_miss";
            }
            return o;
        });

    std::string out;
    StageReport report;
    report.stage = StageKind::Translate;
    report.input_count = programs.size();
    for (const auto& o : outcomes) {
        if (!o.drop_reason.empty()) {
            ++report.dropped_by_reason[o.drop_reason];
            continue;
        }
        for (const auto& c : o.candidates) {
            out += candidate_to_json(c) + "\n";
            ++report.output_count;
        }
    }
    write_file_atomic(artifact_path(cfg, kCandidatesFile), out);
    report.wall_ms = timer.elapsed_ms();
    merge_report(cfg, report);
    return report;
}

StageReport run_verify(const PipelineConfig& cfg, const StageOptions& opts) {
    StageTimer timer;
    ensure_output_dir(cfg);

    const translation::TranslationContext ctx = make_translation_context(cfg);
    const std::string version = record_template_version(cfg, ctx);

    std::vector<Candidate> candidates;
    for (const std::string& line : capped(read_jsonl_lines(artifact_path(cfg, kCandidatesFile)), opts))
        candidates.push_back(candidate_from_json(line));

    struct Outcome {
        verification::Verdict verdict;
        corpus::CorpusRecord record;  // only meaningful when accepted
    };
    const auto outcomes =
        parallel_map(candidates, cfg.jobs, [&](const Candidate& c, std::size_t) -> Outcome {
            Outcome o;
            o.verdict = verification::check_sample(c.program, c.question, c.solution, ctx);
            if (!o.verdict.accepted) return o;
            const lang::ExecutionResult run = lang::execute(c.program, cfg.limits);
            verification::VerifiedItem item;
            item.program = c.program;
            item.question = c.question;
            item.solution = c.solution;
            item.answer_text = run.canonical_text.value_or("");
            item.topic_ids = c.program.provenance.topic_ids;
            item.seed_id = c.program.provenance.seed_id;
            item.language = c.question.language;
            item.sample_index = c.solution.sample_index;
            o.record = corpus::make_record(item, version, cfg.created_at);
            return o;
        });

    std::string verified_out;
    std::string verdict_log;
    StageReport report;
    report.stage = StageKind::Verify;
    report.input_count = candidates.size();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        json entry;
        entry["program_hash"] = candidates[i].program.source_hash;
        entry["sample_index"] = candidates[i].solution.sample_index;
        entry["accepted"] = o.verdict.accepted;
        entry["reason"] = verification::verdict_reason_name(o.verdict.reason);
        verdict_log += entry.dump() + "\n";
        if (o.verdict.accepted) {
            verified_out += corpus::record_to_json(o.record) + "\n";
            ++report.output_count;
        } else {
            ++report.dropped_by_reason[verification::verdict_reason_name(o.verdict.reason)];
        }
    }
    write_file_atomic(artifact_path(cfg, kVerifiedFile), verified_out);
    write_file_atomic(artifact_path(cfg, kVerdictLogFile), verdict_log);
    report.wall_ms = timer.elapsed_ms();
    merge_report(cfg, report);
    return report;
}

StageReport run_decontaminate(const PipelineConfig& cfg, const StageOptions& opts) {
    StageTimer timer;
    ensure_output_dir(cfg);

    const std::vector<corpus::CorpusRecord> records =
        load_records(artifact_path(cfg, kVerifiedFile), opts);
    const std::vector<corpus::CorpusRecord> unique = corpus::dedupe(records);

    const corpus::NgramIndex index = corpus::build_ngram_index(cfg.test_set_paths);
    const auto contaminated = parallel_map(
        unique, cfg.jobs, [&](const corpus::CorpusRecord& r, std::size_t) -> char {
            return corpus::is_contaminated(index, r) ? 1 : 0;
        });

    std::string kept_out;
    std::string removed_out;
    StageReport report;
    report.stage = StageKind::Decontaminate;
    report.input_count = records.size();
    if (records.size() > unique.size())
        report.dropped_by_reason["duplicate"] = records.size() - unique.size();
    for (std::size_t i = 0; i < unique.size(); ++i) {
        if (contaminated[i]) {
            removed_out += corpus::record_to_json(unique[i]) + "\n";
            ++report.dropped_by_reason["contaminated"];
        } else {
            kept_out += corpus::record_to_json(unique[i]) + "\n";
            ++report.output_count;
        }
    }
    write_file_atomic(artifact_path(cfg, kCleanFile), kept_out);
    write_file_atomic(artifact_path(cfg, kRemovedFile), removed_out);
    report.wall_ms = timer.elapsed_ms();
    merge_report(cfg, report);
    return report;
}

StageReport run_export(const PipelineConfig& cfg, const StageOptions& opts) {
    StageTimer timer;
    ensure_output_dir(cfg);

    const std::vector<corpus::CorpusRecord> records =
        load_records(artifact_path(cfg, kCleanFile), opts);
    corpus::export_corpus(records, corpus::ExportFormat::Jsonl, artifact_path(cfg, kCorpusFile));
    corpus::export_corpus(records, corpus::ExportFormat::FinetuneJsonl,
                          artifact_path(cfg, kFinetuneFile));
    const corpus::CorpusStats stats = corpus::compute_stats(records);
    write_file_atomic(artifact_path(cfg, kStatsFile), corpus::stats_to_json(stats) + "\n");

    StageReport report;
    report.stage = StageKind::Export;
    report.input_count = records.size();
    report.output_count = records.size();
    report.wall_ms = timer.elapsed_ms();
    merge_report(cfg, report);
    return report;
}

// ---------------------------------------------------------------------------
// Orchestration.

namespace {

std::vector<const char*> stage_artifacts(StageKind s) {
    switch (s) {
    case StageKind::Synthesize: return {kProgramsFile};
    case StageKind::Mutate: return {kProgramsFinalFile};
    case StageKind::Translate: return {kCandidatesFile};
    case StageKind::Verify: return {kVerifiedFile, kVerdictLogFile};
    case StageKind::Decontaminate: return {kCleanFile, kRemovedFile};
    case StageKind::Export: return {kCorpusFile, kFinetuneFile, kStatsFile};
    }
    return {};
}

bool artifacts_exist(const PipelineConfig& cfg, StageKind s) {
    for (const char* name : stage_artifacts(s))
        if (!fs::exists(artifact_path(cfg, name))) return false;
    return true;
}

StageReport run_stage(const PipelineConfig& cfg, StageKind s, const StageOptions& opts) {
    switch (s) {
    case StageKind::Synthesize: return run_synthesize(cfg, opts);
    case StageKind::Mutate: return run_mutate(cfg, opts);
    case StageKind::Translate: return run_translate(cfg, opts);
    case StageKind::Verify: return run_verify(cfg, opts);
    case StageKind::Decontaminate: return run_decontaminate(cfg, opts);
    case StageKind::Export: return run_export(cfg, opts);
    }
    throw ConfigError("unknown stage");
}

}  // namespace

std::vector<StageReport> run_pipeline(const PipelineConfig& cfg, const RunOptions& opts) {
    ensure_output_dir(cfg);
    StageOptions stage_opts;
    stage_opts.emit_mutation_log = opts.emit_mutation_log;

    std::vector<StageReport> reports;
    const auto persisted = read_report_map(artifact_path(cfg, kReportFile));
    for (const StageKind s : stage_order()) {
        if (opts.resume && artifacts_exist(cfg, s)) {
            const auto it = persisted.find(s);
            StageReport r;
            r.stage = s;
            if (it != persisted.end()) r = it->second;
            reports.push_back(r);
            continue;
        }
        reports.push_back(run_stage(cfg, s, stage_opts));
    }
    return reports;
}

std::vector<StageReport> load_reports(const PipelineConfig& cfg) {
    const std::string path = artifact_path(cfg, kReportFile);
    if (!fs::exists(path)) throw IoError("no report found at " + path);
    const json doc = [&] {
        try {
            return json::parse(read_file(path));
        } catch (const json::exception& e) {
            throw IoError(std::string("malformed report file: ") + e.what());
        }
    }();
    std::vector<StageReport> reports;
    try {
        for (const auto& entry : doc.at("stages"))
            reports.push_back(stage_report_from_json(entry.dump()));
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed report file: ") + e.what());
    }
    return reports;
}

std::string format_reports(const std::vector<StageReport>& reports) {
    std::ostringstream out;
    for (const auto& r : reports) {
        out << std::left << std::setw(14) << stage_kind_name(r.stage) << std::right
            << std::setw(8) << r.input_count << " -> " << std::setw(8) << r.output_count
            << "   " << std::setw(6) << r.wall_ms << " ms";
        if (!r.dropped_by_reason.empty()) {
            out << "   dropped:";
            bool first = true;
            for (const auto& [reason, count] : r.dropped_by_reason) {
                out << (first ? " " : ", ") << reason << "=" << count;
                first = false;
            }
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace mathforge::pipeline
