// Command-line entry point. All command logic lives in the library; this
// file only parses flags and dispatches.

#include <iostream>

#include <CLI11.hpp>

#include "recall/cli.hpp"

using namespace recall;

int main(int argc, char** argv) {
    CLI::App app{"Iterative-retrieval conversational memory engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string providers_flag;
    std::string script_path;
    std::string out_dir;
    int max_iterations = -1;
    int jobs = -1;
    std::string variant_flag;
    std::string memory_flag;
    double edge_threshold = -10.0;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--providers", providers_flag, "Provider mode: mock or live")
        ->check(CLI::IsMember({"mock", "live"}));
    app.add_option("--script", script_path,
                   "Scripted-provider file (deterministic offline traces)");
    app.add_option("--out", out_dir, "Output directory (default: timestamped under ./out)");
    app.add_option("--max-iterations", max_iterations, "Override the loop iteration budget");
    app.add_option("--jobs", jobs, "Concurrent question runs for bench");
    app.add_option("--variant", variant_flag,
                   "Loop variant: single_pass|basic_loop|tiered|temporal|full");
    app.add_option("--memory", memory_flag, "Memory variant: raw_only|index_only|full");
    app.add_option("--edge-threshold", edge_threshold, "Semantic edge cosine threshold");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Build a memory snapshot from a conversation");
    std::string conversations_path, snapshot_out;
    ingest->add_option("--conversations", conversations_path, "LoCoMo-style conversation JSON")
        ->required();
    ingest->add_option("--snapshot-out", snapshot_out, "Snapshot output path")->required();

    // query
    auto* query = app.add_subcommand("query", "Answer one question against a snapshot");
    cli::QueryOptions qopts;
    query->add_option("--snapshot", qopts.snapshot_path, "Snapshot path")->required();
    query->add_option("question", qopts.question, "Question text")->required();
    query->add_option("--trace", qopts.trace_path, "Write a JSONL trace to this path");
    query->add_flag("--print-config", qopts.print_config, "Print the effective config");

    // bench
    auto* bench = app.add_subcommand("bench", "Run the benchmark harness");
    cli::BenchOptionsCli bopts;
    bench->add_option("--conversations", bopts.conversations_path,
                      "Conversation file (stores built per conversation)");
    bench->add_option("--snapshot", bopts.snapshot_path, "Prebuilt snapshot");
    bench->add_option("--qa", bopts.qa_path, "QA records for --snapshot runs");
    bench->add_flag("--grid", bopts.grid, "Run the full loop x memory variant grid");
    bool no_traces = false;
    bench->add_flag("--no-traces", no_traces, "Skip writing JSONL traces");

    // validate-sufficiency
    auto* validate =
        app.add_subcommand("validate-sufficiency", "Classifier-vs-oracle stats from traces");
    std::string traces_path, stats_out;
    validate->add_option("--traces", traces_path, "Trace JSONL from a bench run")->required();
    validate->add_option("--stats-out", stats_out, "Write the stats JSON here");

    CLI11_PARSE(app, argc, argv);

    cli::CliConfig config;
    try {
        config = cli::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitUsage;
    }
    if (providers_flag == "mock") config.mode = cli::ProviderMode::Mock;
    if (providers_flag == "live") config.mode = cli::ProviderMode::Live;
    if (!script_path.empty()) {
        config.mode = cli::ProviderMode::Scripted;
        config.script_path = script_path;
    }
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (max_iterations > 0) config.iris.max_iterations = max_iterations;
    if (jobs > 0) config.jobs = jobs;
    if (edge_threshold >= -1.0 && edge_threshold <= 1.0) config.edge_threshold = edge_threshold;
    if (!variant_flag.empty()) {
        auto v = eval::parse_loop_variant(variant_flag);
        if (!v) {
            std::cerr << "error: unknown variant " << variant_flag << "\n";
            return cli::kExitUsage;
        }
        config.variant = *v;
    }
    if (!memory_flag.empty()) {
        auto v = eval::parse_memory_variant(memory_flag);
        if (!v) {
            std::cerr << "error: unknown memory variant " << memory_flag << "\n";
            return cli::kExitUsage;
        }
        config.memory = *v;
    }

    cli::CommandIO io{&std::cout, &std::cerr};
    try {
        if (*ingest) return cli::cmd_ingest(config, conversations_path, snapshot_out, io);
        if (*query) return cli::cmd_query(config, qopts, io);
        if (*bench) {
            bopts.write_traces = !no_traces;
            return cli::cmd_bench(config, bopts, io);
        }
        if (*validate) return cli::cmd_validate_sufficiency(config, traces_path, stats_out, io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitUsage;
    }
    return cli::kExitUsage;
}
