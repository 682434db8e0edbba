#include "recall/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "recall/metrics.hpp"
#include "recall/text.hpp"

namespace recall::eval {

using nlohmann::json;

const char* loop_variant_name(LoopVariant v) {
    switch (v) {
        case LoopVariant::SinglePass: return "single_pass";
        case LoopVariant::BasicLoop: return "basic_loop";
        case LoopVariant::Tiered: return "tiered";
        case LoopVariant::Temporal: return "temporal";
        case LoopVariant::Full: return "full";
    }
    return "?";
}

const char* memory_variant_name(MemoryVariant v) {
    switch (v) {
        case MemoryVariant::RawOnly: return "raw_only";
        case MemoryVariant::IndexOnly: return "index_only";
        case MemoryVariant::FullMemory: return "full_memory";
    }
    return "?";
}

std::optional<LoopVariant> parse_loop_variant(const std::string& name) {
    for (LoopVariant v : {LoopVariant::SinglePass, LoopVariant::BasicLoop, LoopVariant::Tiered,
                          LoopVariant::Temporal, LoopVariant::Full})
        if (name == loop_variant_name(v)) return v;
    return std::nullopt;
}

std::optional<MemoryVariant> parse_memory_variant(const std::string& name) {
    for (MemoryVariant v :
         {MemoryVariant::RawOnly, MemoryVariant::IndexOnly, MemoryVariant::FullMemory})
        if (name == memory_variant_name(v)) return v;
    if (name == "full") return MemoryVariant::FullMemory;
    return std::nullopt;
}

PipelineFeatures features_for(LoopVariant v) {
    PipelineFeatures f;
    f.iterate = v != LoopVariant::SinglePass;
    f.loop.tiered = v >= LoopVariant::Tiered;
    f.loop.reasoning_chain = v >= LoopVariant::Tiered;
    f.loop.temporal_adaptation = v >= LoopVariant::Temporal;
    f.loop.entity_tracking = v == LoopVariant::Full;
    f.loop.dual_path = v == LoopVariant::Full;
    f.loop.abstention = v == LoopVariant::Full;
    return f;
}

std::unique_ptr<Retriever> make_retriever(MemoryVariant v, const MemoryStore& store,
                                          EmbeddingProvider& embedder) {
    switch (v) {
        case MemoryVariant::RawOnly: return std::make_unique<RawTurnRetriever>(store);
        case MemoryVariant::IndexOnly:
            return std::make_unique<TupleRetriever>(store, embedder, false);
        case MemoryVariant::FullMemory:
            return std::make_unique<TupleRetriever>(store, embedder, true);
    }
    return nullptr;
}

Dataset build_dataset(const LocomoData& data, LLMProvider& extractor,
                      EmbeddingProvider& embedder, double edge_threshold) {
    Dataset ds;
    for (const auto& conv : data.conversations) {
        Dataset::Unit unit;
        unit.id = conv.id;
        for (const auto& turn : conv.turns) {
            auto result = unit.store.ingest_turn(turn, extractor, embedder);
            for (auto& w : result.warnings) ds.warnings.push_back(conv.id + ": " + w);
        }
        unit.store.build_semantic_edges(edge_threshold);
        unit.qa = conv.qa;
        ds.units.push_back(std::move(unit));
    }
    return ds;
}

namespace {

json sufficiency_json(const SufficiencyResult& r) {
    return {{"tier", tier_name(r.tier)},
            {"confidence", r.confidence},
            {"missing", r.missing},
            {"parse_failed", r.parse_failed}};
}

}  // namespace

json question_trace_json(const std::string& conversation_id, std::size_t index,
                         const QARecord& record, const QuestionRun& run,
                         const std::vector<IterationRow>& oracle_rows,
                         bool include_wall_clock) {
    json doc;
    doc["conversation"] = conversation_id;
    doc["question_index"] = index;
    doc["question"] = record.question;
    doc["category"] = record.category;
    doc["gold"] = record.gold_answer;
    doc["gold_evidence"] = record.evidence;
    doc["entities"] = run.ctx.entities;
    doc["temporal"] = run.ctx.temporal;
    if (!run.ctx.matched_keyword.empty()) doc["temporal_keyword"] = run.ctx.matched_keyword;

    json iterations = json::array();
    for (std::size_t i = 0; i < run.state.iterations.size(); ++i) {
        const auto& tr = run.state.iterations[i];
        json row;
        row["iteration"] = tr.iteration;
        row["budget"] = tr.budget;
        row["anchor_ids"] = tr.anchor_ids;
        row["refined_ids"] = tr.refined_ids;
        row["expanded_ids"] = tr.expanded_ids;
        row["new_ids"] = tr.new_ids;
        row["ranked_turns"] = tr.ranked_turns;
        row["raw"] = sufficiency_json(tr.raw);
        row["calibrated"] = sufficiency_json(tr.calibrated);
        if (!tr.strategy.empty()) row["strategy"] = tr.strategy;
        if (!tr.entity_hint.empty()) row["entity_hint"] = tr.entity_hint;
        if (!tr.refined_query_after.empty()) row["refined_query"] = tr.refined_query_after;
        row["expansion_calls"] = tr.expansion_calls;
        if (include_wall_clock) {
            row["retrieval_ms"] = tr.retrieval_ms;
            row["evaluation_ms"] = tr.evaluation_ms;
            row["refinement_ms"] = tr.refinement_ms;
        }
        if (i < oracle_rows.size()) {
            row["oracle"] = oracle_label_name(oracle_rows[i].oracle);
            row["oracle_checker_failed"] = oracle_rows[i].oracle_checker_failed;
        }
        iterations.push_back(std::move(row));
    }
    doc["iterations"] = std::move(iterations);

    json roles = json::array();
    for (const auto& call : run.state.calls) roles.push_back(call_role_name(call.role));
    doc["call_roles"] = std::move(roles);
    doc["llm_calls"] = run.state.calls.size();
    doc["terminated"] = run.single_pass ? "single_pass"
                        : run.state.terminated == TerminationReason::Sufficient
                            ? "sufficient"
                            : "budget_exhausted";
    doc["answer"] = {{"text", run.answer.text},
                     {"abstained", run.answer.abstained},
                     {"tier", tier_name(run.answer.tier)},
                     {"confidence", run.answer.confidence},
                     {"evidence_turn_ids", run.answer.evidence_turn_ids}};
    if (!run.state.warnings.empty()) doc["warnings"] = run.state.warnings;
    if (include_wall_clock) doc["total_ms"] = run.total_ms;
    return doc;
}

namespace {

QuestionReport evaluate_question(const Dataset::Unit& unit, std::size_t index,
                                 const QARecord& record, const BenchOptions& options,
                                 EmbeddingProvider& embedder, LLMProvider& llm, Judge& judge,
                                 InferenceChecker* checker, const IrisConfig& iris) {
    auto retriever = make_retriever(options.memory, unit.store, embedder);

    PipelineProviders providers;
    providers.llm = &llm;
    providers.entity_extractor = options.llm_entities ? &llm : nullptr;
    PipelineFeatures features = features_for(options.variant);

    std::vector<CallRecord> pre_calls;
    std::vector<std::string> pre_warnings;
    QuestionContext ctx =
        preprocess(record.question, providers.entity_extractor, iris, &pre_calls, &pre_warnings);
    ctx.category = static_cast<Category>(record.category);
    QuestionRun run = answer_question(ctx, *retriever, providers, iris, features);
    run.state.calls.insert(run.state.calls.begin(), pre_calls.begin(), pre_calls.end());
    run.state.warnings.insert(run.state.warnings.begin(), pre_warnings.begin(),
                              pre_warnings.end());

    QuestionReport report;
    report.conversation = unit.id;
    report.index = index;
    report.question = record.question;
    report.category = record.category;
    report.gold = record.gold_answer;
    report.gold_evidence = record.evidence;
    report.answer = run.answer.text;
    report.abstained = run.answer.abstained;
    report.tier = tier_name(run.final_result.tier);
    report.confidence = run.final_result.confidence;
    report.iterations = run.state.iteration;
    report.retrieval_rounds = run.state.iterations.size();
    report.llm_calls = run.llm_calls();
    report.terminated = run.single_pass ? "single_pass"
                        : run.state.terminated == TerminationReason::Sufficient
                            ? "sufficient"
                            : "budget_exhausted";
    for (const auto& tr : run.state.iterations) report.expansion_calls += tr.expansion_calls;
    report.f1 = token_f1(run.answer.text, record.gold_answer);
    report.rouge = rouge_l(run.answer.text, record.gold_answer);
    report.latency_ms = run.total_ms;

    auto verdict = judge.judge(record.question, record.gold_answer, run.answer.text);
    report.judge_score = verdict.score;

    // Per-iteration oracle labels over the cumulative retrieved turns.
    std::set<std::string> cumulative;
    for (const auto& tr : run.state.iterations) {
        for (const auto& t : tr.ranked_turns) cumulative.insert(t);
        std::vector<std::string> fact_texts;
        for (const auto& turn : unit.store.get_raw({cumulative.begin(), cumulative.end()}))
            fact_texts.push_back(turn.speaker + ": " + turn.text);
        auto outcome = oracle_label(cumulative, record, checker, fact_texts);
        IterationRow row;
        row.iteration = tr.iteration;
        row.calibrated = tr.calibrated;
        row.oracle = outcome.label;
        row.oracle_checker_failed = outcome.checker_failed;
        row.ranked_turns = tr.ranked_turns;
        report.per_iteration.push_back(std::move(row));
    }

    report.trace = question_trace_json(unit.id, index, record, run, report.per_iteration,
                                       options.include_wall_clock);
    return report;
}

json make_number_or_null(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

struct Accumulator {
    std::size_t n = 0;
    double f1 = 0.0;
    double rouge = 0.0;
    std::size_t judged = 0;
    std::size_t correct = 0;
    std::size_t indeterminate = 0;
    std::size_t abstained = 0;
    double llm_calls = 0.0;
    double iterations = 0.0;
    double latency_ms = 0.0;

    void add(const QuestionReport& q) {
        ++n;
        f1 += q.f1;
        rouge += q.rouge;
        if (q.judge_score) {
            ++judged;
            correct += std::size_t(*q.judge_score);
        } else {
            ++indeterminate;
        }
        if (q.abstained) ++abstained;
        llm_calls += double(q.llm_calls);
        iterations += double(q.iterations);
        latency_ms += q.latency_ms;
    }

    json to_json(bool include_wall_clock) const {
        json out;
        out["n"] = n;
        out["f1"] = n ? f1 / double(n) : 0.0;
        out["rouge_l"] = n ? rouge / double(n) : 0.0;
        out["judge_accuracy"] = judged ? double(correct) / double(judged) : 0.0;
        out["judge_indeterminate"] = indeterminate;
        out["abstention_rate"] = n ? double(abstained) / double(n) : 0.0;
        out["llm_calls_mean"] = n ? llm_calls / double(n) : 0.0;
        out["iterations_mean"] = n ? iterations / double(n) : 0.0;
        if (include_wall_clock) out["latency_ms_mean"] = n ? latency_ms / double(n) : 0.0;
        return out;
    }
};

}  // namespace

json aggregate_rows(const std::vector<QuestionReport>& questions, const BenchOptions& options) {
    json agg;

    Accumulator overall;
    std::map<int, Accumulator> by_category;
    for (const auto& q : questions) {
        overall.add(q);
        by_category[q.category].add(q);
    }
    agg["overall"] = overall.to_json(options.include_wall_clock);
    json cats;
    for (const auto& [cat, acc] : by_category)
        cats[category_name(static_cast<Category>(cat))] = acc.to_json(options.include_wall_clock);
    agg["by_category"] = std::move(cats);

    // Per-iteration retrieval metrics over questions that reached each
    // iteration; gold-free questions are excluded and counted.
    json per_iter = json::array();
    int max_iter = 0;
    for (const auto& q : questions) max_iter = std::max(max_iter, int(q.per_iteration.size()));
    for (int i = 1; i <= max_iter; ++i) {
        std::size_t n = 0, excluded = 0;
        std::map<std::size_t, std::pair<double, double>> sums;  // cutoff -> (recall, ndcg)
        for (const auto& q : questions) {
            if (int(q.per_iteration.size()) < i) continue;
            const auto& row = q.per_iteration[std::size_t(i - 1)];
            std::set<std::string> gold(q.gold_evidence.begin(), q.gold_evidence.end());
            if (gold.empty()) {
                ++excluded;
                continue;
            }
            ++n;
            for (std::size_t k : options.retrieval_cutoffs) {
                auto r = recall_at_k(row.ranked_turns, gold, k);
                auto g = ndcg_at_k(row.ranked_turns, gold, k);
                sums[k].first += r.value_or(0.0);
                sums[k].second += g.value_or(0.0);
            }
        }
        json row;
        row["iteration"] = i;
        row["n"] = n;
        row["excluded_no_gold"] = excluded;
        for (std::size_t k : options.retrieval_cutoffs) {
            std::string suffix = "@" + std::to_string(k);
            row["recall" + suffix] = n ? sums[k].first / double(n) : 0.0;
            row["ndcg" + suffix] = n ? sums[k].second / double(n) : 0.0;
        }
        per_iter.push_back(std::move(row));
    }
    agg["retrieval_per_iteration"] = std::move(per_iter);

    std::vector<ValidationRow> rows;
    for (const auto& q : questions)
        for (const auto& row : q.per_iteration)
            rows.push_back({row.calibrated.tier, row.calibrated.confidence, row.oracle});
    auto stats = validate_classifier(rows);
    agg["classifier_validation"] = {
        {"rows", stats.rows},
        {"binary_agreement", stats.binary_agreement},
        {"sufficiency_precision", make_number_or_null(stats.sufficiency_precision)},
        {"sufficiency_recall", make_number_or_null(stats.sufficiency_recall)},
        {"exact_precision", make_number_or_null(stats.exact_precision)},
        {"precision_at_0.85", make_number_or_null(stats.precision_at_temporal)},
        {"precision_at_0.7", make_number_or_null(stats.precision_at_general)},
        {"spearman_rho", make_number_or_null(stats.spearman_rho)},
        {"pr_auc", make_number_or_null(stats.pr_auc)},
    };
    return agg;
}

RunReport run_bench(const Dataset& dataset, const BenchOptions& options,
                    EmbeddingProvider& embedder, LLMProvider& llm, Judge& judge,
                    InferenceChecker* checker, const IrisConfig& iris) {
    iris.validate();
    RunReport report;
    report.loop_variant = loop_variant_name(options.variant);
    report.memory_variant = memory_variant_name(options.memory);

    struct Task {
        const Dataset::Unit* unit;
        std::size_t index;
        const QARecord* record;
    };
    std::vector<Task> tasks;
    for (const auto& unit : dataset.units)
        for (std::size_t i = 0; i < unit.qa.size(); ++i) tasks.push_back({&unit, i, &unit.qa[i]});

    report.questions.resize(tasks.size());
    auto evaluate_or_record = [&](std::size_t t) {
        const Task& task = tasks[t];
        try {
            report.questions[t] = evaluate_question(*task.unit, task.index, *task.record,
                                                    options, embedder, llm, judge, checker, iris);
        } catch (const std::exception& e) {
            // Per-question failures never abort the run; they are reported.
            QuestionReport failed;
            failed.conversation = task.unit->id;
            failed.index = task.index;
            failed.question = task.record->question;
            failed.category = task.record->category;
            failed.gold = task.record->gold_answer;
            failed.gold_evidence = task.record->evidence;
            failed.failed = true;
            failed.error = e.what();
            failed.trace = json{{"conversation", task.unit->id},
                                {"question_index", task.index},
                                {"question", task.record->question},
                                {"failed", true},
                                {"error", failed.error}};
            report.questions[t] = std::move(failed);
        }
    };

    int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) evaluate_or_record(t);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                std::size_t t = next.fetch_add(1);
                if (t >= tasks.size()) break;
                evaluate_or_record(t);
            }
        };
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    report.aggregates = aggregate_rows(report.questions, options);
    return report;
}

std::size_t RunReport::failures() const {
    std::size_t n = 0;
    for (const auto& q : questions)
        if (q.failed) ++n;
    return n;
}

json RunReport::to_json() const {
    json doc;
    doc["loop_variant"] = loop_variant;
    doc["memory_variant"] = memory_variant;
    doc["n_questions"] = questions.size();
    doc["n_failed"] = failures();
    json rows = json::array();
    for (const auto& q : questions) {
        json row;
        row["conversation"] = q.conversation;
        row["question_index"] = q.index;
        row["question"] = q.question;
        row["category"] = q.category;
        row["gold"] = q.gold;
        row["answer"] = q.answer;
        row["abstained"] = q.abstained;
        row["tier"] = q.tier;
        row["confidence"] = q.confidence;
        row["iterations"] = q.iterations;
        row["retrieval_rounds"] = q.retrieval_rounds;
        row["llm_calls"] = q.llm_calls;
        row["expansion_calls"] = q.expansion_calls;
        row["terminated"] = q.terminated;
        row["f1"] = q.f1;
        row["rouge_l"] = q.rouge;
        row["judge"] = q.judge_score ? json(*q.judge_score) : json(nullptr);
        if (q.failed) {
            row["failed"] = true;
            row["error"] = q.error;
        }
        rows.push_back(std::move(row));
    }
    doc["per_question"] = std::move(rows);
    doc["aggregates"] = aggregates;
    return doc;
}

std::string RunReport::to_text_table() const {
    auto pct = [](const json& v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%5.1f%%", v.get<double>() * 100.0);
        return std::string(buf);
    };
    auto num = [](const json& v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%6.3f", v.get<double>());
        return std::string(buf);
    };

    std::string out;
    out += "Variant: " + loop_variant + " / " + memory_variant + "\n";
    out += "Category      N     JudgeAcc   F1      ROUGE-L  Calls\n";
    auto emit = [&](const std::string& name, const json& acc) {
        char line[160];
        std::snprintf(line, sizeof line, "%-12s %-5llu %s   %s  %s  %6.2f\n", name.c_str(),
                      static_cast<unsigned long long>(acc["n"].get<std::size_t>()),
                      pct(acc["judge_accuracy"]).c_str(), num(acc["f1"]).c_str(),
                      num(acc["rouge_l"]).c_str(), acc["llm_calls_mean"].get<double>());
        out += line;
    };
    emit("overall", aggregates["overall"]);
    if (aggregates.contains("by_category"))
        for (const auto& [name, acc] : aggregates["by_category"].items()) emit(name, acc);
    return out;
}

void write_trace_jsonl(const RunReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
    for (const auto& q : report.questions) out << q.trace.dump() << "\n";
}

TraceValidationInput read_validation_rows(const std::string& trace_path) {
    std::ifstream in(trace_path);
    if (!in) throw std::runtime_error("cannot open trace file: " + trace_path);
    TraceValidationInput input;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json doc = json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.contains("iterations") || !doc["iterations"].is_array()) {
            ++input.skipped;
            continue;
        }
        for (const auto& row : doc["iterations"]) {
            if (!row.contains("calibrated") || !row.contains("oracle")) {
                ++input.skipped;
                continue;
            }
            const auto& cal = row["calibrated"];
            if (!cal.contains("tier") || !cal.contains("confidence")) {
                ++input.skipped;
                continue;
            }
            ValidationRow v;
            std::string tier = cal["tier"].get<std::string>();
            if (tier == "EXACT")
                v.tier = Tier::Exact;
            else if (tier == "INFERRABLE")
                v.tier = Tier::Inferrable;
            else if (tier == "PARTIAL")
                v.tier = Tier::Partial;
            else if (tier == "NONE")
                v.tier = Tier::None;
            else {
                ++input.skipped;
                continue;
            }
            v.confidence = cal["confidence"].get<double>();
            std::string oracle = row["oracle"].get<std::string>();
            if (oracle == "EXACT")
                v.oracle = OracleLabel::Exact;
            else if (oracle == "INFERRABLE")
                v.oracle = OracleLabel::Inferrable;
            else if (oracle == "PARTIAL_OR_NONE")
                v.oracle = OracleLabel::PartialOrNone;
            else {
                ++input.skipped;
                continue;
            }
            input.rows.push_back(v);
        }
    }
    return input;
}

}  // namespace recall::eval
