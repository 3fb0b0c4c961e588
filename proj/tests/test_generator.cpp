#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mathforge/generator.hpp"

#include "httplib.h"
#include "json.hpp"

#include <atomic>
#include <thread>

using namespace mathforge::gen;

TEST_CASE("default prompts declare only slots their text actually uses") {
    CHECK_NOTHROW(validate_prompts(default_prompts()));
    CHECK(default_prompts().size() == 5);
    for (const auto& tpl : default_prompts()) {
        CHECK(prompt_for(tpl.id).name == tpl.name);
        CHECK(!tpl.version.empty());
        for (const auto& slot : tpl.slots)
            CHECK(tpl.text.find("{" + slot + "}") != std::string::npos);
    }
}

TEST_CASE("fill_prompt substitutes every slot and rejects missing values") {
    const PromptTemplate& tpl = prompt_for(PromptId::QuestionFromProgram);
    std::map<std::string, std::string> values;
    for (const auto& slot : tpl.slots) values[slot] = "<" + slot + ">";
    const std::string filled = fill_prompt(tpl, values);
    CHECK(filled.find('{') == std::string::npos);
    for (const auto& slot : tpl.slots)
        CHECK(filled.find("<" + slot + ">") != std::string::npos);

    values.erase(tpl.slots.front());
    CHECK_THROWS_AS(fill_prompt(tpl, values), std::invalid_argument);
}

TEST_CASE("fenced block extraction") {
    CHECK(first_fenced_block("preamble\n```\nprint(1);\n```\ntrailer") == "print(1);\n");
    CHECK(first_fenced_block("```python\nx = 1\n```") == "x = 1\n");
    SUBCASE("tagged lookup skips differently tagged blocks") {
        const std::string text =
            "```note\nskip me\n```\n```rewrite_program_list\n[1, 2]\n```\n";
        CHECK(first_fenced_block(text, "rewrite_program_list") == "[1, 2]\n");
        CHECK(first_fenced_block(text, "absent") == std::nullopt);
    }
    CHECK(first_fenced_block("no fences here") == std::nullopt);
    CHECK(first_fenced_block("``` unterminated\nbody") == std::nullopt);
}

namespace {

// Minimal in-process endpoint implementing the wire contract.
struct MockServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> hits{0};

    explicit MockServer(std::function<void(int, const std::string&, httplib::Response&)> handler) {
        server.Post("/complete", [this, handler](const httplib::Request& req,
                                                 httplib::Response& res) {
            handler(++hits, req.body, res);
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~MockServer() {
        server.stop();
        thread.join();
    }

    GeneratorConfig config(int max_retries = 2) const {
        GeneratorConfig cfg;
        cfg.mode = GeneratorMode::External;
        cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/complete";
        cfg.model_name = "mock-model";
        cfg.max_retries = max_retries;
        return cfg;
    }
};

}  // namespace

TEST_CASE("external client round-trips the JSON wire contract") {
    MockServer mock([](int, const std::string& body, httplib::Response& res) {
        const auto req = nlohmann::json::parse(body);
        REQUIRE(req.contains("prompt"));
        REQUIRE(req.contains("model"));
        nlohmann::json reply;
        reply["completion"] = "echo: " + req["prompt"].get<std::string>();
        res.set_content(reply.dump(), "application/json");
    });
    const ExternalClient client(mock.config());
    CHECK(client.complete("2 + 2") == "echo: 2 + 2");
    CHECK(mock.hits.load() == 1);
}

TEST_CASE("external client retries transient failures, then succeeds") {
    MockServer mock([](int hit, const std::string&, httplib::Response& res) {
        if (hit < 3) {
            res.status = 500;
            return;
        }
        res.set_content(R"({"completion": "recovered"})", "application/json");
    });
    const ExternalClient client(mock.config(/*max_retries=*/2));
    CHECK(client.complete("p") == "recovered");
    CHECK(mock.hits.load() == 3);
}

TEST_CASE("external client throws AdapterError after exhausting retries") {
    MockServer mock([](int, const std::string&, httplib::Response& res) { res.status = 503; });
    const ExternalClient client(mock.config(/*max_retries=*/1));
    CHECK_THROWS_AS(client.complete("p"), AdapterError);
    CHECK(mock.hits.load() == 2);  // first attempt + one retry
}

TEST_CASE("malformed responses and malformed endpoints are adapter errors") {
    MockServer mock([](int, const std::string&, httplib::Response& res) {
        res.set_content(R"({"unexpected": true})", "application/json");
    });
    const ExternalClient client(mock.config(/*max_retries=*/0));
    CHECK_THROWS_AS(client.complete("p"), AdapterError);

    GeneratorConfig bad;
    bad.mode = GeneratorMode::External;
    bad.endpoint = "ftp://example.com/x";
    CHECK_THROWS_AS(ExternalClient{bad}, AdapterError);
}
