#include "mathforge/corpus.hpp"

#include "mathforge/sha256.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace mathforge::corpus {

using ordered_json = nlohmann::ordered_json;

std::string make_record_id(const std::string& program_hash,
                           const std::string& question_text, int sample_index) {
    return Sha256::hex_digest(program_hash + ":" + Sha256::hex_digest(question_text) +
                              ":" + std::to_string(sample_index));
}

CorpusRecord make_record(const verification::VerifiedItem& item,
                         const std::string& template_version,
                         const std::string& created_at) {
    CorpusRecord r;
    r.id = make_record_id(item.program.source_hash, item.question.text, item.sample_index);
    r.source = item.seed_id.empty() ? "knowledge" : "seed";
    r.topics = item.topic_ids;
    r.language = item.language;
    r.program_source = lang::render(item.program);
    r.question_text = item.question.text;
    r.solution_text = item.solution.text;
    r.answer_text = item.answer_text;
    r.mutation_trace = item.program.mutation_trace;
    r.template_version = template_version;
    r.created_at = created_at;
    return r;
}

// ---------------------------------------------------------------------------
// Tokenizer: unicode_alnum_lower_v1.

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

bool is_unicode_punct(char32_t cp) {
    return (cp >= 0x2000 && cp <= 0x206F) ||  // general punctuation
           (cp >= 0x3000 && cp <= 0x303F) ||  // CJK symbols and punctuation
           (cp >= 0xFF00 && cp <= 0xFF0F) ||  // fullwidth ! to /
           (cp >= 0xFF1A && cp <= 0xFF20) ||  // fullwidth : to @
           (cp >= 0xFF3B && cp <= 0xFF40) ||  // fullwidth [ to `
           (cp >= 0xFF5B && cp <= 0xFF65);    // fullwidth { to halfwidth .
}

bool is_cjk_ideograph(char32_t cp) { return cp >= 0x4E00 && cp <= 0x9FFF; }

// Minimal UTF-8 decoding; malformed bytes act as separators.
std::size_t decode_utf8(const std::string& s, std::size_t i, char32_t& cp) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    auto cont = [&](std::size_t k) {
        return i + k < s.size() &&
               (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        cp = (char32_t(b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
        return 2;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        cp = (char32_t(b0 & 0x0F) << 12) |
             (char32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
             (static_cast<unsigned char>(s[i + 2]) & 0x3F);
        return 3;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        cp = (char32_t(b0 & 0x07) << 18) |
             (char32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
             (char32_t(static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
             (static_cast<unsigned char>(s[i + 3]) & 0x3F);
        return 4;
    }
    cp = 0;  // malformed: treated as separator
    return 1;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&]() {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (std::size_t i = 0; i < text.size();) {
        char32_t cp = 0;
        const std::size_t len = decode_utf8(text, i, cp);
        i += len;
        if (cp < 0x80) {
            const auto c = static_cast<unsigned char>(cp);
            if (std::isalnum(c)) {
                current += static_cast<char>(std::tolower(c));
            } else {
                flush();
            }
        } else if (cp == 0 || is_unicode_punct(cp)) {
            flush();
        } else if (is_cjk_ideograph(cp)) {
            // Ideographs are tokens of their own so CJK text n-grams work.
            flush();
            append_utf8(current, cp);
            flush();
        } else {
            append_utf8(current, cp);
        }
    }
    flush();
    return tokens;
}

std::vector<std::uint64_t> ngram_fingerprints(const std::string& text, int n) {
    const std::vector<std::string> tokens = tokenize(text);
    std::vector<std::uint64_t> out;
    if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return out;
    std::vector<std::uint64_t> token_hashes;
    token_hashes.reserve(tokens.size());
    for (const auto& t : tokens)
        token_hashes.push_back(fnv1a(kFnvOffset, t.data(), t.size()));
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::uint64_t h = kFnvOffset;
        for (int k = 0; k < n; ++k) {
            const std::uint64_t th = token_hashes[i + static_cast<std::size_t>(k)];
            h = fnv1a(h, &th, sizeof(th));
        }
        out.push_back(h);
    }
    return out;
}

void index_text(NgramIndex& idx, const std::string& text) {
    for (const auto fp : ngram_fingerprints(text, idx.n)) idx.fingerprints.insert(fp);
}

NgramIndex build_ngram_index(const std::vector<std::string>& paths, int n) {
    NgramIndex idx;
    idx.n = n;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open test-set file: " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string content = buf.str();

        // JSONL mode when the first non-empty line is an object with "text".
        std::istringstream lines(content);
        std::string first;
        while (std::getline(lines, first)) {
            if (first.find_first_not_of(" \t\r") != std::string::npos) break;
            first.clear();
        }
        bool jsonl = false;
        if (!first.empty() && first[first.find_first_not_of(" \t\r")] == '{') {
            const auto probe = nlohmann::json::parse(first, nullptr, false);
            jsonl = !probe.is_discarded() && probe.is_object() && probe.contains("text") &&
                    probe["text"].is_string();
        }
        if (jsonl) {
            std::istringstream again(content);
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(again, line)) {
                ++line_no;
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                const auto j = nlohmann::json::parse(line, nullptr, false);
                if (j.is_discarded() || !j.is_object() || !j.contains("text") ||
                    !j["text"].is_string())
                    throw IoError("bad JSONL test-set record at " + path + ":" +
                                  std::to_string(line_no));
                index_text(idx, j["text"].get<std::string>());
            }
        } else {
            index_text(idx, content);
        }
    }
    return idx;
}

bool is_contaminated(const NgramIndex& idx, const CorpusRecord& r) {
    if (idx.empty()) return false;
    for (const auto fp : ngram_fingerprints(r.question_text, idx.n))
        if (idx.fingerprints.count(fp)) return true;
    for (const auto fp : ngram_fingerprints(r.solution_text, idx.n))
        if (idx.fingerprints.count(fp)) return true;
    return false;
}

std::pair<std::vector<CorpusRecord>, std::vector<CorpusRecord>> decontaminate(
    const std::vector<CorpusRecord>& records, const NgramIndex& idx) {
    std::vector<CorpusRecord> kept, removed;
    for (const auto& r : records) {
        if (is_contaminated(idx, r))
            removed.push_back(r);
        else
            kept.push_back(r);
    }
    return {std::move(kept), std::move(removed)};
}

std::vector<CorpusRecord> dedupe(const std::vector<CorpusRecord>& records) {
    std::set<std::string> seen;
    std::vector<CorpusRecord> out;
    for (const auto& r : records) {
        const std::string key = Sha256::hex_digest(r.program_source) + ":" +
                                Sha256::hex_digest(r.question_text) + ":" +
                                Sha256::hex_digest(r.solution_text);
        if (seen.insert(key).second) out.push_back(r);
    }
    return out;
}

CorpusStats compute_stats(const std::vector<CorpusRecord>& records) {
    CorpusStats s;
    s.total_records = records.size();
    std::set<std::string> programs, pairs;
    for (const auto& r : records) {
        const std::string ph = Sha256::hex_digest(r.program_source);
        programs.insert(ph);
        pairs.insert(ph + ":" + Sha256::hex_digest(r.question_text));
        s.per_source_counts[r.source] += 1;
        s.per_language_counts[r.language] += 1;
        for (const auto& t : r.topics) s.per_topic_counts[t] += 1;
    }
    s.unique_programs = programs.size();
    s.unique_pairs = pairs.size();
    s.avg_solutions_per_pair =
        pairs.empty() ? lang::Rational(0)
                      : lang::Rational(lang::BigInt(records.size()), lang::BigInt(pairs.size()));
    return s;
}

std::string stats_to_json(const CorpusStats& s) {
    ordered_json j;
    j["total_records"] = s.total_records;
    j["unique_programs"] = s.unique_programs;
    j["unique_pairs"] = s.unique_pairs;
    j["per_source_counts"] = ordered_json::object();
    for (const auto& [k, v] : s.per_source_counts) j["per_source_counts"][k] = v;
    j["per_topic_counts"] = ordered_json::object();
    for (const auto& [k, v] : s.per_topic_counts) j["per_topic_counts"][k] = v;
    j["per_language_counts"] = ordered_json::object();
    for (const auto& [k, v] : s.per_language_counts) j["per_language_counts"][k] = v;
    j["avg_solutions_per_pair"] = s.avg_solutions_per_pair.str();
    return j.dump(2) + "\n";
}

std::string record_to_json(const CorpusRecord& r) {
    ordered_json j;
    j["id"] = r.id;
    j["source"] = r.source;
    j["topics"] = r.topics;
    j["language"] = r.language;
    j["program"] = r.program_source;
    j["question"] = r.question_text;
    j["solution"] = r.solution_text;
    j["answer"] = r.answer_text;
    j["mutation_trace"] = ordered_json::array();
    for (const auto& m : r.mutation_trace) {
        ordered_json mj;
        mj["kind"] = m.kind;
        mj["site"] = m.site;
        mj["before"] = m.before;
        mj["after"] = m.after;
        mj["iteration"] = m.iteration;
        j["mutation_trace"].push_back(std::move(mj));
    }
    j["template_version"] = r.template_version;
    j["created_at"] = r.created_at;
    return j.dump();
}

CorpusRecord record_from_json(const std::string& line) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw IoError("malformed corpus record");
    CorpusRecord r;
    try {
        r.id = j.at("id").get<std::string>();
        r.source = j.at("source").get<std::string>();
        r.topics = j.at("topics").get<std::vector<std::string>>();
        r.language = j.at("language").get<std::string>();
        r.program_source = j.at("program").get<std::string>();
        r.question_text = j.at("question").get<std::string>();
        r.solution_text = j.at("solution").get<std::string>();
        r.answer_text = j.at("answer").get<std::string>();
        for (const auto& mj : j.at("mutation_trace")) {
            lang::MutationRecord m;
            m.kind = mj.at("kind").get<std::string>();
            m.site = mj.at("site").get<std::string>();
            m.before = mj.at("before").get<std::string>();
            m.after = mj.at("after").get<std::string>();
            m.iteration = mj.at("iteration").get<int>();
            r.mutation_trace.push_back(std::move(m));
        }
        r.template_version = j.at("template_version").get<std::string>();
        r.created_at = j.at("created_at").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed corpus record: ") + e.what());
    }
    return r;
}

void export_corpus(std::vector<CorpusRecord> records, ExportFormat format,
                   const std::string& path) {
    std::sort(records.begin(), records.end(),
              [](const CorpusRecord& a, const CorpusRecord& b) { return a.id < b.id; });
    std::ostringstream out;
    for (const auto& r : records) {
        if (format == ExportFormat::Jsonl) {
            out << record_to_json(r) << "\n";
        } else {
            ordered_json j;
            j["instruction"] = r.question_text;
            j["output"] = r.solution_text;
            out << j.dump() << "\n";
        }
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp);
        f << out.str();
        if (!f.good()) throw IoError("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot move " + tmp + " into place");
}

std::vector<CorpusRecord> import_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::vector<CorpusRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        records.push_back(record_from_json(line));
    }
    return records;
}

}  // namespace mathforge::corpus
