#pragma once

#include "mathforge/ast.hpp"
#include "mathforge/value.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mathforge::lang {

struct Limits {
    long max_steps = 100000;
    std::size_t max_nodes = 10000;
    long timeout_ms = 2000;
};

enum class ExecStatus { Ok, ParseError, RuntimeError, StepLimitExceeded, TimeLimit };

std::string exec_status_name(ExecStatus s);

struct TraceEntry {
    std::size_t statement_index = 0;  // index into the top-level statement list
    std::string var;
    Value value;
};

struct ExecutionResult {
    ExecStatus status = ExecStatus::Ok;
    std::optional<Value> output;
    std::optional<std::string> canonical_text;
    long steps_used = 0;
    std::vector<TraceEntry> trace;
    std::string message;  // populated on failure
};

// Deterministic, sandboxed execution; never throws, never aborts.
ExecutionResult execute(const Program& p, const Limits& limits = {});

// parse + execute; syntax failures come back as status ParseError.
ExecutionResult run_source(const std::string& source, const Limits& limits = {});

} // namespace mathforge::lang
