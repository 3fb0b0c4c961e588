#pragma once

// Corpus assembly: record construction, exact-duplicate removal, n-gram
// decontamination against benchmark test sets, summary statistics, and
// byte-deterministic JSONL export/import.
//
// Decontamination fingerprints 10-gram token windows with 64-bit FNV-1a
// hashes under the "unicode_alnum_lower_v1" rule: ASCII alphanumeric runs
// (lowercased) form tokens, CJK ideographs are single-character tokens,
// other non-ASCII letters extend the current run, and everything else -
// ASCII punctuation, whitespace, and common Unicode punctuation blocks -
// separates tokens.  A record is contaminated when any fingerprint of its
// question or solution appears in the index.

#include "mathforge/ast.hpp"
#include "mathforge/rational.hpp"
#include "mathforge/verification.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mathforge::corpus {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct CorpusRecord {
    std::string id;      // sha256(program_hash : question digest : sample index)
    std::string source;  // "knowledge" | "seed"
    std::vector<std::string> topics;
    std::string language;
    std::string program_source;
    std::string question_text;
    std::string solution_text;
    std::string answer_text;
    std::vector<lang::MutationRecord> mutation_trace;
    std::string template_version;
    std::string created_at;  // ISO-8601 UTC
};

std::string make_record_id(const std::string& program_hash,
                           const std::string& question_text, int sample_index);

CorpusRecord make_record(const verification::VerifiedItem& item,
                         const std::string& template_version,
                         const std::string& created_at);

// ---------------------------------------------------------------------------
// N-gram index.

struct NgramIndex {
    int n = 10;
    std::string token_rule = "unicode_alnum_lower_v1";
    std::unordered_set<std::uint64_t> fingerprints;

    bool empty() const { return fingerprints.empty(); }
};

std::vector<std::string> tokenize(const std::string& text);
std::vector<std::uint64_t> ngram_fingerprints(const std::string& text, int n);

void index_text(NgramIndex& idx, const std::string& text);

// Each path is either JSONL whose objects carry a "text" field (detected
// from the first non-empty line) or a plain text document indexed whole.
NgramIndex build_ngram_index(const std::vector<std::string>& paths, int n = 10);

bool is_contaminated(const NgramIndex& idx, const CorpusRecord& r);

// Partition into (kept, removed), both preserving input order.
std::pair<std::vector<CorpusRecord>, std::vector<CorpusRecord>> decontaminate(
    const std::vector<CorpusRecord>& records, const NgramIndex& idx);

// Drops exact duplicates of (program_source, question_text, solution_text),
// keeping the first occurrence.
std::vector<CorpusRecord> dedupe(const std::vector<CorpusRecord>& records);

// ---------------------------------------------------------------------------
// Statistics and export.

struct CorpusStats {
    std::size_t total_records = 0;
    std::size_t unique_programs = 0;
    std::size_t unique_pairs = 0;  // distinct (program hash, question digest)
    std::map<std::string, std::size_t> per_source_counts;
    std::map<std::string, std::size_t> per_topic_counts;
    std::map<std::string, std::size_t> per_language_counts;
    // total_records / unique_pairs, exact (0 for an empty corpus).
    lang::Rational avg_solutions_per_pair;
};

CorpusStats compute_stats(const std::vector<CorpusRecord>& records);
std::string stats_to_json(const CorpusStats& s);

enum class ExportFormat {
    Jsonl,          // full records
    FinetuneJsonl,  // exactly {"instruction": question, "output": solution}
};

std::string record_to_json(const CorpusRecord& r);
CorpusRecord record_from_json(const std::string& line);  // throws IoError

// Records are written sorted by id, one compact JSON object per line, via a
// temp file renamed into place.  Output bytes depend only on the records.
void export_corpus(std::vector<CorpusRecord> records, ExportFormat format,
                   const std::string& path);

std::vector<CorpusRecord> import_corpus(const std::string& path);

}  // namespace mathforge::corpus
