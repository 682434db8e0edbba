#pragma once
// Command-line surface: ingest conversations into snapshots, answer single
// questions with visible traces, run benchmark/ablation grids, and validate
// the sufficiency classifier from trace logs. Kept as a library so the
// commands are testable in-process; the binary is a thin wrapper.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recall/bench.hpp"
#include "recall/http_provider.hpp"
#include "recall/iris.hpp"

namespace recall::cli {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;     // usage or IO error
inline constexpr int kExitProvider = 3;  // provider error
inline constexpr int kExitPartial = 4;   // benchmark completed with failures

enum class ProviderMode { Mock, Live, Scripted };

struct CliConfig {
    ProviderMode mode = ProviderMode::Mock;
    HttpProviderConfig http;
    IrisConfig iris;
    double edge_threshold = 0.80;
    std::size_t hash_embedding_dim = 256;
    int jobs = 1;
    eval::LoopVariant variant = eval::LoopVariant::Full;
    eval::MemoryVariant memory = eval::MemoryVariant::FullMemory;
    std::string out_dir;  // empty = timestamped directory under ./out
    std::string script_path;

    nlohmann::json to_json() const;
};

// Precedence: CLI flag > environment > config file > built-in default.
// Flags are applied by the command parser after this merge.
CliConfig load_config(const std::string& config_path_or_empty);

// Bundles the wired providers for one run.
struct ProviderSet {
    std::unique_ptr<LLMProvider> llm;
    std::unique_ptr<EmbeddingProvider> embedder;
    std::unique_ptr<eval::Judge> judge;
    std::unique_ptr<eval::InferenceChecker> checker;
    bool live = false;
};

ProviderSet make_providers(const CliConfig& config);

struct CommandIO {
    std::ostream* out;
    std::ostream* err;
};

int cmd_ingest(const CliConfig& config, const std::string& conversations_path,
               const std::string& snapshot_out, const CommandIO& io);

struct QueryOptions {
    std::string snapshot_path;
    std::string question;
    std::string trace_path;  // optional JSONL trace output
    bool print_config = false;
};

int cmd_query(const CliConfig& config, const QueryOptions& options, const CommandIO& io);

struct BenchOptionsCli {
    std::string conversations_path;  // build stores from a conversation file
    std::string snapshot_path;       // or reuse one snapshot...
    std::string qa_path;             // ...with QA records on the side
    bool grid = false;               // run the full loop x memory grid
    bool write_traces = true;
};

int cmd_bench(const CliConfig& config, const BenchOptionsCli& options, const CommandIO& io);

int cmd_validate_sufficiency(const CliConfig& config, const std::string& traces_path,
                             const std::string& stats_out, const CommandIO& io);

}  // namespace recall::cli
