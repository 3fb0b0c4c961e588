#pragma once

#include "mathforge/ast.hpp"
#include "mathforge/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mathforge::knowledge {

enum class Stage { Elementary, Middle, High, College };

std::string stage_name(Stage s);
std::optional<Stage> stage_from_name(const std::string& name);

// One node of the three-tier taxonomy: stage -> subject -> topic.
struct KnowledgeTopic {
    std::string id;  // unique slug
    Stage stage = Stage::Elementary;
    std::string subject;
    std::string topic;
};

struct Tool {
    std::string name;  // [a-z_][a-z0-9_]*
    int min_arity = 0;
    int max_arity = 0;
    std::string description;
};

class KnowledgeError : public std::runtime_error {
public:
    enum class Kind { ParseError, DuplicateTopicId, UnknownStage, EmptySystem, Validation };

    KnowledgeError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct KnowledgeSystem {
    std::vector<KnowledgeTopic> topics;  // kept sorted by id
    std::vector<Stage> stage_order;      // each stage exactly once
    std::map<std::string, std::set<std::string>> topic_tools;

    bool empty() const { return topics.empty(); }
    const KnowledgeTopic* find(const std::string& id) const;
    int stage_index(Stage s) const;  // -1 when absent
};

struct TopicCombo {
    std::vector<std::string> topics;  // 1-3 unique topic ids, draw order
    std::uint64_t rng_seed_used = 0;
};

// Optional structural assertions applied after a successful load; meant for
// full-scale deployments (e.g. insist on >= 250 topics).
struct ValidationOptions {
    std::size_t min_topics = 0;
    std::size_t min_toolkit = 0;  // lower bound on |toolkit_union|
};

KnowledgeSystem parse_knowledge_system(const std::string& json_text,
                                       const ValidationOptions& opts = {});
KnowledgeSystem load_knowledge_system(const std::string& path,
                                      const ValidationOptions& opts = {});

// Canonical serialization: topics sorted by id, tools sorted, stable key
// order. load(serialize(ks)) == ks byte-for-byte.
std::string serialize_knowledge_system(const KnowledgeSystem& ks);

// Uniform combo size over the feasible subset of {1,2,3}; topics drawn
// without replacement from a uniformly chosen stage window (one stage, or
// two adjacent stages in stage_order) that has enough topics.
TopicCombo sample_topic_combination(const KnowledgeSystem& ks, Rng& rng);

// Syntax pattern mining: which builtins does each topic's program corpus use.
std::map<std::string, std::set<std::string>> mine_topic_tools(
    const std::map<std::string, std::vector<lang::Program>>& programs_by_topic);

std::set<std::string> toolkit_union(
    const std::map<std::string, std::set<std::string>>& mapping);

// The DSL builtin registry with arities and one-line descriptions.
const std::vector<Tool>& builtin_tool_registry();

} // namespace mathforge::knowledge
