#pragma once
// Benchmark harness: builds per-conversation memory, runs the question
// pipeline across the loop/memory variant grid, scores answers and
// retrieval, and assembles deterministic JSON reports plus JSONL traces.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recall/judge.hpp"
#include "recall/locomo.hpp"
#include "recall/memory_store.hpp"
#include "recall/oracle.hpp"
#include "recall/pipeline.hpp"

namespace recall::eval {

enum class LoopVariant { SinglePass, BasicLoop, Tiered, Temporal, Full };
enum class MemoryVariant { RawOnly, IndexOnly, FullMemory };

const char* loop_variant_name(LoopVariant v);
const char* memory_variant_name(MemoryVariant v);
std::optional<LoopVariant> parse_loop_variant(const std::string& name);
std::optional<MemoryVariant> parse_memory_variant(const std::string& name);

// Feature switches per additive variant.
PipelineFeatures features_for(LoopVariant v);

std::unique_ptr<Retriever> make_retriever(MemoryVariant v, const MemoryStore& store,
                                          EmbeddingProvider& embedder);

struct Dataset {
    struct Unit {
        std::string id;
        MemoryStore store;
        std::vector<QARecord> qa;
    };
    std::vector<Unit> units;
    std::vector<std::string> warnings;
};

// Ingests every conversation into its own store and builds semantic edges.
Dataset build_dataset(const LocomoData& data, LLMProvider& extractor,
                      EmbeddingProvider& embedder, double edge_threshold);

struct BenchOptions {
    LoopVariant variant = LoopVariant::Full;
    MemoryVariant memory = MemoryVariant::FullMemory;
    int jobs = 1;
    bool include_wall_clock = false;  // mock runs report call counts instead
    bool llm_entities = true;         // use the LLM for question entities
    std::vector<std::size_t> retrieval_cutoffs = {5, 10, 20};
};

struct IterationRow {
    int iteration = 0;
    SufficiencyResult calibrated;
    OracleLabel oracle = OracleLabel::PartialOrNone;
    bool oracle_checker_failed = false;
    std::vector<std::string> ranked_turns;
};

struct QuestionReport {
    std::string conversation;
    std::size_t index = 0;  // position within the conversation's QA list
    std::string question;
    int category = 0;
    std::string gold;
    std::vector<std::string> gold_evidence;
    std::string answer;
    bool abstained = false;
    std::string tier;
    double confidence = 0.0;
    int iterations = 0;
    std::size_t retrieval_rounds = 0;
    std::size_t llm_calls = 0;
    std::size_t expansion_calls = 0;
    std::string terminated;
    double f1 = 0.0;
    double rouge = 0.0;
    std::optional<int> judge_score;
    double latency_ms = 0.0;
    bool failed = false;
    std::string error;
    std::vector<IterationRow> per_iteration;
    nlohmann::json trace;  // full per-question trace (one JSONL line)
};

struct RunReport {
    std::string loop_variant;
    std::string memory_variant;
    std::vector<QuestionReport> questions;
    nlohmann::json aggregates;

    std::size_t failures() const;

    // Deterministic report document (traces excluded).
    nlohmann::json to_json() const;
    std::string to_text_table() const;
};

// Recomputes the aggregate block from the per-question rows.
nlohmann::json aggregate_rows(const std::vector<QuestionReport>& questions,
                              const BenchOptions& options);

RunReport run_bench(const Dataset& dataset, const BenchOptions& options,
                    EmbeddingProvider& embedder, LLMProvider& llm, Judge& judge,
                    InferenceChecker* checker, const IrisConfig& iris);

// One question's full trace document (one JSONL line in trace files).
nlohmann::json question_trace_json(const std::string& conversation_id, std::size_t index,
                                   const QARecord& record, const QuestionRun& run,
                                   const std::vector<IterationRow>& oracle_rows,
                                   bool include_wall_clock);

// Writes one JSON line per question.
void write_trace_jsonl(const RunReport& report, const std::string& path);

// Reads validation rows back out of a trace file; malformed rows are skipped
// and counted.
struct TraceValidationInput {
    std::vector<ValidationRow> rows;
    std::size_t skipped = 0;
};
TraceValidationInput read_validation_rows(const std::string& trace_path);

}  // namespace recall::eval
