// mathforge CLI: runs pipeline stages against a JSON config.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 I/O error,
// 4 external generator (adapter) error.

#include "mathforge/pipeline.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

namespace {

struct CliArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::size_t> limit;
    bool emit_mutation_log = false;
    bool resume = false;
};

void add_common_options(CLI::App* cmd, CliArgs& args) {
    cmd->add_option("--config", args.config_path, "Pipeline config file (JSON)")
        ->required();
    cmd->add_option("--seed", args.seed, "Override global_seed from the config");
    cmd->add_option("--jobs", args.jobs, "Override worker count from the config")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()));
    cmd->add_option("--limit", args.limit, "Cap the number of input items this stage consumes");
    cmd->add_flag("--emit-mutation-log", args.emit_mutation_log,
                  "Write mutation_log.jsonl during the mutate stage");
}

int dispatch(const std::string& command, const CliArgs& args) {
    namespace pl = mathforge::pipeline;
    pl::PipelineConfig cfg = pl::load_pipeline_config(args.config_path);
    if (args.seed) cfg.global_seed = *args.seed;
    if (args.jobs) cfg.jobs = *args.jobs;

    if (command == "report") {
        std::cout << pl::format_reports(pl::load_reports(cfg));
        return 0;
    }
    if (command == "run-all") {
        pl::RunOptions opts;
        opts.resume = args.resume;
        opts.emit_mutation_log = args.emit_mutation_log;
        std::cout << pl::format_reports(pl::run_pipeline(cfg, opts));
        return 0;
    }

    pl::StageOptions opts;
    opts.limit = args.limit;
    opts.emit_mutation_log = args.emit_mutation_log;
    pl::StageReport report;
    if (command == "synthesize")
        report = pl::run_synthesize(cfg, opts);
    else if (command == "mutate")
        report = pl::run_mutate(cfg, opts);
    else if (command == "translate")
        report = pl::run_translate(cfg, opts);
    else if (command == "verify")
        report = pl::run_verify(cfg, opts);
    else if (command == "decontaminate")
        report = pl::run_decontaminate(cfg, opts);
    else if (command == "export")
        report = pl::run_export(cfg, opts);
    else
        return 2;
    std::cout << pl::format_reports({report});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mathforge: deterministic synthesis of a verified math reasoning corpus"};
    app.require_subcommand(1);

    CliArgs args;
    const char* stage_commands[] = {"synthesize", "mutate",        "translate", "verify",
                                    "decontaminate", "export",     "run-all",   "report"};
    const char* stage_help[] = {
        "Generate programs from knowledge topics and seed questions",
        "Grow the program set with validated AST mutations",
        "Render questions and worked solutions for each program",
        "Keep only samples whose extracted answer matches execution",
        "Drop duplicates and records overlapping registered test sets",
        "Write the final corpus, fine-tune file, and statistics",
        "Run every stage in order",
        "Print the persisted stage reports of the last run",
    };
    for (std::size_t i = 0; i < 8; ++i) {
        CLI::App* cmd = app.add_subcommand(stage_commands[i], stage_help[i]);
        add_common_options(cmd, args);
        if (std::string(stage_commands[i]) == "run-all")
            cmd->add_flag("--resume", args.resume, "Skip stages whose artifacts already exist");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return dispatch(command, args);
    } catch (const mathforge::pipeline::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mathforge::corpus::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const mathforge::gen::AdapterError& e) {
        std::cerr << "adapter error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
