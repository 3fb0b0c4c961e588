#include "mathforge/knowledge.hpp"

#include "mathforge/parser.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mathforge::knowledge {

using json = nlohmann::ordered_json;

std::string stage_name(Stage s) {
    switch (s) {
    case Stage::Elementary: return "Elementary";
    case Stage::Middle: return "Middle";
    case Stage::High: return "High";
    case Stage::College: return "College";
    }
    return "Unknown";
}

std::optional<Stage> stage_from_name(const std::string& name) {
    if (name == "Elementary") return Stage::Elementary;
    if (name == "Middle") return Stage::Middle;
    if (name == "High") return Stage::High;
    if (name == "College") return Stage::College;
    return std::nullopt;
}

const KnowledgeTopic* KnowledgeSystem::find(const std::string& id) const {
    const auto it = std::lower_bound(topics.begin(), topics.end(), id,
                                     [](const KnowledgeTopic& t, const std::string& key) {
                                         return t.id < key;
                                     });
    if (it != topics.end() && it->id == id) return &*it;
    return nullptr;
}

int KnowledgeSystem::stage_index(Stage s) const {
    for (std::size_t i = 0; i < stage_order.size(); ++i)
        if (stage_order[i] == s) return static_cast<int>(i);
    return -1;
}

namespace {

bool valid_tool_name(const std::string& name) {
    if (name.empty()) return false;
    if (!(std::islower(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
    for (const char c : name)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

} // namespace

KnowledgeSystem parse_knowledge_system(const std::string& json_text,
                                       const ValidationOptions& opts) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw KnowledgeError(KnowledgeError::Kind::ParseError, e.what());
    }
    if (!doc.is_object() || !doc.contains("stages") || !doc.contains("topics"))
        throw KnowledgeError(KnowledgeError::Kind::ParseError,
                             "knowledge file needs top-level 'stages' and 'topics'");

    KnowledgeSystem ks;
    std::set<Stage> seen_stages;
    for (const auto& s : doc["stages"]) {
        if (!s.is_string())
            throw KnowledgeError(KnowledgeError::Kind::ParseError, "stage entries must be strings");
        const auto stage = stage_from_name(s.get<std::string>());
        if (!stage)
            throw KnowledgeError(KnowledgeError::Kind::UnknownStage,
                                 "unknown stage '" + s.get<std::string>() + "'");
        if (!seen_stages.insert(*stage).second)
            throw KnowledgeError(KnowledgeError::Kind::ParseError,
                                 "stage '" + s.get<std::string>() + "' listed twice");
        ks.stage_order.push_back(*stage);
    }
    if (ks.stage_order.empty())
        throw KnowledgeError(KnowledgeError::Kind::ParseError, "no stages declared");

    std::set<std::string> ids;
    for (const auto& t : doc["topics"]) {
        KnowledgeTopic topic;
        try {
            topic.id = t.at("id").get<std::string>();
            const std::string stage_str = t.at("stage").get<std::string>();
            const auto stage = stage_from_name(stage_str);
            if (!stage)
                throw KnowledgeError(KnowledgeError::Kind::UnknownStage,
                                     "topic '" + topic.id + "' has unknown stage '" + stage_str +
                                         "'");
            topic.stage = *stage;
            topic.subject = t.at("subject").get<std::string>();
            topic.topic = t.at("topic").get<std::string>();
        } catch (const json::exception& e) {
            throw KnowledgeError(KnowledgeError::Kind::ParseError, e.what());
        }
        if (topic.id.empty() || topic.subject.empty() || topic.topic.empty())
            throw KnowledgeError(KnowledgeError::Kind::ParseError,
                                 "topic fields must be non-empty");
        if (seen_stages.find(topic.stage) == seen_stages.end())
            throw KnowledgeError(KnowledgeError::Kind::UnknownStage,
                                 "topic '" + topic.id + "' uses a stage missing from stage_order");
        if (!ids.insert(topic.id).second)
            throw KnowledgeError(KnowledgeError::Kind::DuplicateTopicId,
                                 "duplicate topic id '" + topic.id + "'");
        std::set<std::string> tools;
        if (t.contains("tools")) {
            for (const auto& tool : t["tools"]) {
                const std::string name = tool.get<std::string>();
                if (!valid_tool_name(name))
                    throw KnowledgeError(KnowledgeError::Kind::ParseError,
                                         "tool name '" + name + "' is not a valid identifier");
                tools.insert(name);
            }
        }
        ks.topic_tools.emplace(topic.id, std::move(tools));
        ks.topics.push_back(std::move(topic));
    }
    if (ks.topics.empty())
        throw KnowledgeError(KnowledgeError::Kind::EmptySystem, "knowledge system has no topics");

    std::sort(ks.topics.begin(), ks.topics.end(),
              [](const KnowledgeTopic& a, const KnowledgeTopic& b) { return a.id < b.id; });

    if (ks.topics.size() < opts.min_topics)
        throw KnowledgeError(KnowledgeError::Kind::Validation,
                             "knowledge system has " + std::to_string(ks.topics.size()) +
                                 " topics, need at least " + std::to_string(opts.min_topics));
    if (opts.min_toolkit > 0 && toolkit_union(ks.topic_tools).size() < opts.min_toolkit)
        throw KnowledgeError(KnowledgeError::Kind::Validation,
                             "toolkit union is smaller than required");
    return ks;
}

KnowledgeSystem load_knowledge_system(const std::string& path, const ValidationOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw KnowledgeError(KnowledgeError::Kind::ParseError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_knowledge_system(buf.str(), opts);
}

std::string serialize_knowledge_system(const KnowledgeSystem& ks) {
    json doc;
    doc["stages"] = json::array();
    for (const Stage s : ks.stage_order) doc["stages"].push_back(stage_name(s));
    doc["topics"] = json::array();
    for (const auto& t : ks.topics) {  // already sorted by id
        json jt;
        jt["id"] = t.id;
        jt["stage"] = stage_name(t.stage);
        jt["subject"] = t.subject;
        jt["topic"] = t.topic;
        jt["tools"] = json::array();
        const auto it = ks.topic_tools.find(t.id);
        if (it != ks.topic_tools.end())
            for (const auto& name : it->second) jt["tools"].push_back(name);
        doc["topics"].push_back(std::move(jt));
    }
    return doc.dump(2) + "\n";
}

TopicCombo sample_topic_combination(const KnowledgeSystem& ks, Rng& rng) {
    if (ks.empty())
        throw KnowledgeError(KnowledgeError::Kind::EmptySystem, "cannot sample an empty system");

    // Stage windows: every single stage and every adjacent pair, with the
    // topics that fall inside.
    struct Window {
        std::vector<std::string> topic_ids;
    };
    std::vector<Window> windows;
    const std::size_t n_stages = ks.stage_order.size();
    auto topics_in = [&](int lo, int hi) {
        Window w;
        for (const auto& t : ks.topics) {
            const int idx = ks.stage_index(t.stage);
            if (idx >= lo && idx <= hi) w.topic_ids.push_back(t.id);
        }
        return w;
    };
    for (std::size_t i = 0; i < n_stages; ++i) windows.push_back(topics_in(int(i), int(i)));
    for (std::size_t i = 0; i + 1 < n_stages; ++i)
        windows.push_back(topics_in(int(i), int(i + 1)));

    // Feasible sizes: a size counts when some window holds that many topics.
    std::size_t max_window = 0;
    for (const auto& w : windows) max_window = std::max(max_window, w.topic_ids.size());
    std::vector<std::size_t> sizes;
    for (std::size_t s = 1; s <= 3; ++s)
        if (s <= max_window) sizes.push_back(s);

    const std::size_t size = sizes[rng.below(sizes.size())];
    std::vector<const Window*> eligible;
    for (const auto& w : windows)
        if (w.topic_ids.size() >= size) eligible.push_back(&w);

    const Window& window = *eligible[rng.below(eligible.size())];
    std::vector<std::string> pool = window.topic_ids;
    TopicCombo combo;
    combo.rng_seed_used = rng.seed();
    for (std::size_t k = 0; k < size; ++k) {
        const std::size_t pick = rng.below(pool.size());
        combo.topics.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return combo;
}

std::map<std::string, std::set<std::string>> mine_topic_tools(
    const std::map<std::string, std::vector<lang::Program>>& programs_by_topic) {
    std::map<std::string, std::set<std::string>> out;
    for (const auto& [topic, programs] : programs_by_topic) {
        std::set<std::string> tools;
        for (const auto& p : programs) {
            const auto calls = lang::collect_builtin_calls(p);
            tools.insert(calls.begin(), calls.end());
        }
        out.emplace(topic, std::move(tools));
    }
    return out;
}

std::set<std::string> toolkit_union(const std::map<std::string, std::set<std::string>>& mapping) {
    std::set<std::string> out;
    for (const auto& [topic, tools] : mapping) {
        (void)topic;
        out.insert(tools.begin(), tools.end());
    }
    return out;
}

const std::vector<Tool>& builtin_tool_registry() {
    static const std::vector<Tool> registry = [] {
        std::vector<Tool> r;
        const std::map<std::string, std::string> blurbs = {
            {"solve", "solve a list of equations for the listed unknowns"},
            {"subst", "substitute a value for a symbol in an expression"},
            {"expand", "expanded normal form of a polynomial expression"},
            {"simplify", "simplified normal form of an expression"},
            {"gcd", "greatest common divisor, extended to rationals"},
            {"lcm", "least common multiple, extended to rationals"},
            {"abs", "absolute value"},
            {"sqrt", "exact square root when possible, else 12-digit decimal"},
            {"pow", "integer power"},
            {"sum", "bounded series sum over an index symbol"},
            {"deriv", "polynomial derivative with respect to a symbol"},
            {"evalf", "force a 12-significant-digit decimal"},
            {"min", "smaller of two values"},
            {"max", "larger of two values"},
            {"floor", "greatest integer not above the value"},
            {"mod", "remainder with the sign of the divisor"},
        };
        for (const auto& [name, arity] : lang::builtin_arities()) {
            Tool t;
            t.name = name;
            t.min_arity = arity;
            t.max_arity = arity;
            const auto it = blurbs.find(name);
            t.description = it == blurbs.end() ? "" : it->second;
            r.push_back(std::move(t));
        }
        return r;
    }();
    return registry;
}

} // namespace mathforge::knowledge
