#pragma once

// Pipeline: configuration, stage orchestration, and on-disk intermediates.
//
// Stages run in a fixed order — synthesize, mutate, translate, verify,
// decontaminate, export — each reading the previous stage's JSONL artifact
// from output_dir and writing its own atomically (temp file + rename), so a
// crashed run can resume without byte-level drift.  All per-item randomness
// is derived from (global_seed, item key), which makes Template-mode output
// bytes a pure function of (config, inputs, seed) regardless of the worker
// count.

#include "mathforge/corpus.hpp"
#include "mathforge/generator.hpp"
#include "mathforge/interpreter.hpp"
#include "mathforge/knowledge.hpp"
#include "mathforge/mutation.hpp"
#include "mathforge/synthesis.hpp"
#include "mathforge/translation.hpp"
#include "mathforge/verification.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mathforge::pipeline {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct PipelineConfig {
    std::string knowledge_path;
    std::string seed_questions_path;  // empty = no seed corpus
    std::string template_path;        // required in Template mode
    gen::GeneratorConfig generator;
    std::size_t n_knowledge_programs = 0;
    int mutation_k = 0;
    int n_solution_samples = 1;
    lang::Limits limits;
    std::vector<std::string> test_set_paths;
    std::string language = "en";
    std::uint64_t global_seed = 0;
    int jobs = 1;
    std::string output_dir;
    std::string created_at = "1970-01-01T00:00:00Z";
    bool emit_mutation_log = false;
};

// Strict parse: unknown keys, wrong types, and invariant violations
// (n_solution_samples >= 1, jobs >= 1, ...) all raise ConfigError.
PipelineConfig parse_pipeline_config(const std::string& json_text);

// Reads the file and resolves relative input paths (knowledge, seeds,
// templates, test sets) against the config file's directory; output_dir is
// kept as written, i.e. relative to the working directory.
PipelineConfig load_pipeline_config(const std::string& path);

// ---------------------------------------------------------------------------
// Stage reports.

enum class StageKind { Synthesize, Mutate, Translate, Verify, Decontaminate, Export };

std::string stage_kind_name(StageKind s);

struct StageReport {
    StageKind stage = StageKind::Synthesize;
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    std::map<std::string, std::size_t> dropped_by_reason;
    long wall_ms = 0;
};

// ---------------------------------------------------------------------------
// Artifact names under cfg.output_dir.

inline constexpr const char* kProgramsFile = "programs.jsonl";
inline constexpr const char* kProgramsFinalFile = "programs_final.jsonl";
inline constexpr const char* kMutationLogFile = "mutation_log.jsonl";
inline constexpr const char* kCandidatesFile = "candidates.jsonl";
inline constexpr const char* kVerifiedFile = "verified.jsonl";
inline constexpr const char* kVerdictLogFile = "verdicts.jsonl";
inline constexpr const char* kCleanFile = "corpus_clean.jsonl";
inline constexpr const char* kRemovedFile = "corpus_removed.jsonl";
inline constexpr const char* kCorpusFile = "corpus.jsonl";
inline constexpr const char* kFinetuneFile = "corpus_finetune.jsonl";
inline constexpr const char* kStatsFile = "stats.json";
inline constexpr const char* kReportFile = "report.json";

std::string artifact_path(const PipelineConfig& cfg, const char* name);

// ---------------------------------------------------------------------------
// Intermediate serializers (one JSON object per line).  Loaders re-parse the
// stored source and reject lines whose recomputed hash disagrees with the
// stored one, so tampered intermediates surface as IoError instead of
// silently flowing downstream.

std::string program_to_json(const lang::Program& p);
lang::Program program_from_json(const std::string& line);  // throws corpus::IoError

struct Candidate {
    lang::Program program;
    translation::Question question;
    translation::Solution solution;
};

std::string candidate_to_json(const Candidate& c);
Candidate candidate_from_json(const std::string& line);  // throws corpus::IoError

std::string stage_report_to_json(const StageReport& r);
StageReport stage_report_from_json(const std::string& text);  // throws corpus::IoError

// ---------------------------------------------------------------------------
// Stages.  Each validates its inputs, writes its artifacts atomically, and
// merges its report into report.json.  `limit`, when set, caps how many
// input items the stage consumes.

struct StageOptions {
    std::optional<std::size_t> limit;
    bool emit_mutation_log = false;
};

StageReport run_synthesize(const PipelineConfig& cfg, const StageOptions& opts = {});
StageReport run_mutate(const PipelineConfig& cfg, const StageOptions& opts = {});
StageReport run_translate(const PipelineConfig& cfg, const StageOptions& opts = {});
StageReport run_verify(const PipelineConfig& cfg, const StageOptions& opts = {});
StageReport run_decontaminate(const PipelineConfig& cfg, const StageOptions& opts = {});
StageReport run_export(const PipelineConfig& cfg, const StageOptions& opts = {});

struct RunOptions {
    bool resume = false;  // skip stages whose artifacts already exist
    bool emit_mutation_log = false;
};

// All six stages in order; returns one report per stage (resumed stages
// reuse the report persisted by the run that produced their artifacts).
std::vector<StageReport> run_pipeline(const PipelineConfig& cfg, const RunOptions& opts = {});

// Reports persisted by the last run, in pipeline order.
std::vector<StageReport> load_reports(const PipelineConfig& cfg);  // throws corpus::IoError

// Human-readable one-line-per-stage rendering used by the CLI.
std::string format_reports(const std::vector<StageReport>& reports);

}  // namespace mathforge::pipeline
