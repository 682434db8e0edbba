#include "recall/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "recall/mock_provider.hpp"
#include "recall/text.hpp"

namespace recall::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::optional<CallRole> parse_role(const std::string& name) {
    for (CallRole r : {CallRole::Extract, CallRole::Sufficiency, CallRole::Refine,
                       CallRole::Reason, CallRole::Answer, CallRole::Judge})
        if (name == call_role_name(r)) return r;
    return std::nullopt;
}

std::vector<ScriptedProvider::Entry> load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open script file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array())
        throw std::runtime_error("script file must be a JSON array: " + path);
    std::vector<ScriptedProvider::Entry> entries;
    for (const auto& row : doc) {
        ScriptedProvider::Entry e;
        if (row.contains("role")) {
            auto role = parse_role(row["role"].get<std::string>());
            if (!role) throw std::runtime_error("unknown role in script: " + row["role"].dump());
            e.role = role;
        }
        e.pattern = row.value("pattern", "");
        e.response = row.value("response", "");
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string timestamp_dir() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", std::localtime(&t));
    return std::string("out/run-") + buf;
}

void apply_json_config(CliConfig& cfg, const json& doc) {
    if (doc.contains("providers")) {
        const auto& p = doc["providers"];
        std::string mode = p.value("mode", "");
        if (mode == "mock") cfg.mode = ProviderMode::Mock;
        if (mode == "live") cfg.mode = ProviderMode::Live;
        cfg.http.base_url = p.value("base_url", cfg.http.base_url);
        cfg.http.api_key_env = p.value("api_key_env", cfg.http.api_key_env);
        cfg.http.model_light = p.value("model_light", cfg.http.model_light);
        cfg.http.model_answer = p.value("model_answer", cfg.http.model_answer);
        cfg.http.embedding_model = p.value("embedding_model", cfg.http.embedding_model);
        cfg.http.embedding_dim = p.value("embedding_dim", cfg.http.embedding_dim);
        cfg.http.temperature = p.value("temperature", cfg.http.temperature);
        cfg.http.timeout_sec = p.value("timeout_sec", cfg.http.timeout_sec);
        cfg.http.retries = p.value("retries", cfg.http.retries);
    }
    if (doc.contains("iris")) {
        const auto& i = doc["iris"];
        auto& c = cfg.iris;
        c.max_iterations = i.value("max_iterations", c.max_iterations);
        c.base_budget = i.value("base_budget", c.base_budget);
        c.budget_step = i.value("budget_step", c.budget_step);
        c.theta_general = i.value("theta_general", c.theta_general);
        c.theta_temporal = i.value("theta_temporal", c.theta_temporal);
        c.entity_fact_threshold = i.value("entity_fact_threshold", c.entity_fact_threshold);
        c.exact_floor = i.value("exact_floor", c.exact_floor);
        c.inferrable_cap = i.value("inferrable_cap", c.inferrable_cap);
        c.partial_cap = i.value("partial_cap", c.partial_cap);
        c.entity_downgrade_cap = i.value("entity_downgrade_cap", c.entity_downgrade_cap);
        c.abstention_floor = i.value("abstention_floor", c.abstention_floor);
        if (i.contains("temporal_threshold_scope")) {
            std::string scope = i["temporal_threshold_scope"].get<std::string>();
            if (scope == "all_tiers")
                c.temporal_threshold_scope = TemporalThresholdScope::AllTiers;
            else if (scope == "exact_only")
                c.temporal_threshold_scope = TemporalThresholdScope::ExactOnly;
            else
                throw std::runtime_error("unknown temporal_threshold_scope: " + scope);
        }
        if (i.contains("temporal_keywords"))
            c.temporal_keywords = i["temporal_keywords"].get<std::vector<std::string>>();
        c.sufficiency_fact_cap = i.value("sufficiency_fact_cap", c.sufficiency_fact_cap);
    }
    if (doc.contains("memory")) {
        const auto& m = doc["memory"];
        cfg.edge_threshold = m.value("edge_threshold", cfg.edge_threshold);
        cfg.hash_embedding_dim = m.value("hash_embedding_dim", cfg.hash_embedding_dim);
    }
    if (doc.contains("bench")) {
        const auto& b = doc["bench"];
        cfg.jobs = b.value("jobs", cfg.jobs);
        if (b.contains("variant")) {
            auto v = eval::parse_loop_variant(b["variant"].get<std::string>());
            if (!v) throw std::runtime_error("unknown bench variant in config");
            cfg.variant = *v;
        }
        if (b.contains("memory")) {
            auto v = eval::parse_memory_variant(b["memory"].get<std::string>());
            if (!v) throw std::runtime_error("unknown bench memory variant in config");
            cfg.memory = *v;
        }
    }
}

}  // namespace

json CliConfig::to_json() const {
    json doc;
    doc["providers"] = {
        {"mode", mode == ProviderMode::Mock       ? "mock"
                 : mode == ProviderMode::Live     ? "live"
                                                  : "scripted"},
        {"base_url", http.base_url},
        {"api_key_env", http.api_key_env},
        {"model_light", http.model_light},
        {"model_answer", http.model_answer},
        {"embedding_model", http.embedding_model},
        {"embedding_dim", http.embedding_dim},
        {"temperature", http.temperature},
        {"timeout_sec", http.timeout_sec},
        {"retries", http.retries},
    };
    doc["iris"] = {
        {"max_iterations", iris.max_iterations},
        {"base_budget", iris.base_budget},
        {"budget_step", iris.budget_step},
        {"theta_general", iris.theta_general},
        {"theta_temporal", iris.theta_temporal},
        {"entity_fact_threshold", iris.entity_fact_threshold},
        {"exact_floor", iris.exact_floor},
        {"inferrable_cap", iris.inferrable_cap},
        {"partial_cap", iris.partial_cap},
        {"entity_downgrade_cap", iris.entity_downgrade_cap},
        {"abstention_floor", iris.abstention_floor},
        {"temporal_threshold_scope",
         iris.temporal_threshold_scope == TemporalThresholdScope::ExactOnly ? "exact_only"
                                                                            : "all_tiers"},
        {"temporal_keywords", iris.temporal_keywords},
        {"sufficiency_fact_cap", iris.sufficiency_fact_cap},
    };
    doc["memory"] = {{"edge_threshold", edge_threshold},
                     {"hash_embedding_dim", hash_embedding_dim}};
    doc["bench"] = {{"jobs", jobs},
                    {"variant", eval::loop_variant_name(variant)},
                    {"memory", eval::memory_variant_name(memory)}};
    return doc;
}

CliConfig load_config(const std::string& config_path_or_empty) {
    CliConfig cfg;
    if (!config_path_or_empty.empty()) {
        std::ifstream in(config_path_or_empty);
        if (!in) throw std::runtime_error("cannot open config file: " + config_path_or_empty);
        json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded())
            throw std::runtime_error("malformed config JSON: " + config_path_or_empty);
        apply_json_config(cfg, doc);
    }
    if (const char* base = std::getenv("RECALL_BASE_URL"); base && *base)
        cfg.http.base_url = base;
    return cfg;
}

ProviderSet make_providers(const CliConfig& config) {
    ProviderSet set;
    switch (config.mode) {
        case ProviderMode::Mock:
            set.llm = std::make_unique<MockProvider>();
            set.embedder = std::make_unique<HashEmbeddingProvider>(config.hash_embedding_dim);
            break;
        case ProviderMode::Scripted:
            set.llm = std::make_unique<ScriptedProvider>(load_script(config.script_path), true);
            set.embedder = std::make_unique<HashEmbeddingProvider>(config.hash_embedding_dim);
            break;
        case ProviderMode::Live:
            set.llm = std::make_unique<HttpChatProvider>(config.http);
            set.embedder = std::make_unique<HttpEmbeddingProvider>(config.http);
            set.live = true;
            break;
    }
    if (set.live) {
        set.judge = std::make_unique<eval::LLMJudge>(*set.llm);
        set.checker = std::make_unique<eval::LLMChecker>(*set.llm);
    } else {
        set.judge = std::make_unique<eval::RuleJudge>();
        set.checker = std::make_unique<eval::CoverageRatioChecker>();
    }
    return set;
}

int cmd_ingest(const CliConfig& config, const std::string& conversations_path,
               const std::string& snapshot_out, const CommandIO& io) {
    if (!fs::exists(conversations_path)) {
        *io.err << "error: conversation file not found: " << conversations_path << "\n";
        return kExitUsage;
    }
    eval::LocomoData data;
    try {
        data = eval::load_locomo(conversations_path);
    } catch (const std::exception& e) {
        *io.err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    for (const auto& s : data.skipped) *io.err << "skipped: " << s << "\n";

    ProviderSet providers;
    try {
        providers = make_providers(config);
    } catch (const std::exception& e) {
        *io.err << "provider error: " << e.what() << "\n";
        return kExitProvider;
    }

    try {
        eval::Dataset dataset = eval::build_dataset(data, *providers.llm, *providers.embedder,
                                                    config.edge_threshold);
        for (const auto& w : dataset.warnings) *io.err << "warning: " << w << "\n";
        for (std::size_t i = 0; i < dataset.units.size(); ++i) {
            const auto& unit = dataset.units[i];
            std::string path = snapshot_out;
            if (dataset.units.size() > 1) {
                fs::path p(snapshot_out);
                path = (p.parent_path() / (p.stem().string() + "." + unit.id + ".json")).string();
            }
            unit.store.save(path);
            *io.out << unit.id << ": " << unit.store.turns().size() << " turns, "
                    << unit.store.tuples().size() << " tuples, "
                    << unit.store.edge_count(EdgeKind::SameSource) << " same-source edges, "
                    << unit.store.edge_count(EdgeKind::Semantic) << " semantic edges -> " << path
                    << "\n";
        }
    } catch (const ProviderError& e) {
        *io.err << "provider error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const std::exception& e) {
        *io.err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_query(const CliConfig& config, const QueryOptions& options, const CommandIO& io) {
    if (options.print_config) *io.out << config.to_json().dump(2) << "\n";
    MemoryStore store;
    try {
        store = MemoryStore::load(options.snapshot_path);
    } catch (const std::exception& e) {
        *io.err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    ProviderSet providers;
    try {
        providers = make_providers(config);
    } catch (const std::exception& e) {
        *io.err << "provider error: " << e.what() << "\n";
        return kExitProvider;
    }

    try {
        auto retriever = eval::make_retriever(config.memory, store, *providers.embedder);
        PipelineProviders pipe;
        pipe.llm = providers.llm.get();
        // Scripted runs preprocess with the rule-based extractor only, so a
        // case script does not need EXTRACT entries.
        pipe.entity_extractor =
            config.mode == ProviderMode::Mock ? providers.llm.get() : nullptr;
        PipelineFeatures features = eval::features_for(config.variant);
        QuestionRun run =
            answer_question(options.question, *retriever, pipe, config.iris, features);

        *io.out << "answer: " << run.answer.text << "\n";
        *io.out << "tier: " << tier_name(run.final_result.tier)
                << "  confidence: " << run.final_result.confidence
                << "  abstained: " << (run.answer.abstained ? "yes" : "no") << "\n";
        *io.out << "iterations: " << run.iterations() << "  llm-calls: " << run.llm_calls()
                << "\n";

        if (!options.trace_path.empty()) {
            eval::QARecord record;
            record.question = options.question;
            auto doc = eval::question_trace_json("query", 0, record, run, {}, true);
            std::ofstream out(options.trace_path, std::ios::trunc);
            if (!out) {
                *io.err << "error: cannot write trace: " << options.trace_path << "\n";
                return kExitUsage;
            }
            out << doc.dump() << "\n";
        }
    } catch (const ProviderError& e) {
        *io.err << "provider error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const std::exception& e) {
        *io.err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

namespace {

std::vector<eval::QARecord> load_qa_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open qa file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array())
        throw std::runtime_error("qa file must be a JSON array: " + path);
    std::vector<eval::QARecord> out;
    for (const auto& row : doc) {
        eval::QARecord rec;
        rec.question = row.at("question").get<std::string>();
        rec.gold_answer = row.value("answer", "");
        rec.category = row.value("category", 1);
        if (row.contains("evidence"))
            for (const auto& e : row["evidence"]) rec.evidence.push_back(e.get<std::string>());
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

int cmd_bench(const CliConfig& config, const BenchOptionsCli& options, const CommandIO& io) {
    ProviderSet providers;
    try {
        providers = make_providers(config);
    } catch (const std::exception& e) {
        *io.err << "provider error: " << e.what() << "\n";
        return kExitProvider;
    }

    eval::Dataset dataset;
    try {
        if (!options.conversations_path.empty()) {
            auto data = eval::load_locomo(options.conversations_path);
            for (const auto& s : data.skipped) *io.err << "skipped: " << s << "\n";
            dataset = eval::build_dataset(data, *providers.llm, *providers.embedder,
                                          config.edge_threshold);
        } else if (!options.snapshot_path.empty() && !options.qa_path.empty()) {
            eval::Dataset::Unit unit;
            unit.id = fs::path(options.snapshot_path).stem().string();
            unit.store = MemoryStore::load(options.snapshot_path);
            unit.qa = load_qa_file(options.qa_path);
            dataset.units.push_back(std::move(unit));
        } else {
            *io.err << "error: bench needs --conversations or --snapshot with --qa\n";
            return kExitUsage;
        }
    } catch (const ProviderError& e) {
        *io.err << "provider error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const std::exception& e) {
        *io.err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::string out_dir = config.out_dir.empty() ? timestamp_dir() : config.out_dir;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        *io.err << "error: cannot create output directory " << out_dir << "\n";
        return kExitUsage;
    }

    std::vector<std::pair<eval::LoopVariant, eval::MemoryVariant>> grid;
    if (options.grid) {
        for (auto lv : {eval::LoopVariant::SinglePass, eval::LoopVariant::BasicLoop,
                        eval::LoopVariant::Tiered, eval::LoopVariant::Temporal,
                        eval::LoopVariant::Full})
            for (auto mv : {eval::MemoryVariant::RawOnly, eval::MemoryVariant::IndexOnly,
                            eval::MemoryVariant::FullMemory})
                grid.emplace_back(lv, mv);
    } else {
        grid.emplace_back(config.variant, config.memory);
    }

    std::size_t failures = 0;
    for (const auto& [lv, mv] : grid) {
        eval::BenchOptions bench;
        bench.variant = lv;
        bench.memory = mv;
        bench.jobs = config.jobs;
        bench.include_wall_clock = config.mode == ProviderMode::Live;
        auto report = eval::run_bench(dataset, bench, *providers.embedder, *providers.llm,
                                      *providers.judge, providers.checker.get(), config.iris);
        failures += report.failures();

        std::string stem = std::string(eval::loop_variant_name(lv)) + "_" +
                           eval::memory_variant_name(mv);
        std::string report_path = out_dir + "/report_" + stem + ".json";
        std::ofstream rout(report_path, std::ios::trunc);
        rout << report.to_json().dump(2) << "\n";
        if (options.write_traces)
            eval::write_trace_jsonl(report, out_dir + "/trace_" + stem + ".jsonl");
        *io.out << report.to_text_table() << "-> " << report_path << "\n";
    }
    return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_validate_sufficiency(const CliConfig& config, const std::string& traces_path,
                             const std::string& stats_out, const CommandIO& io) {
    eval::TraceValidationInput input;
    try {
        input = eval::read_validation_rows(traces_path);
    } catch (const std::exception& e) {
        *io.err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    auto stats = eval::validate_classifier(input.rows, config.iris.theta_general,
                                           config.iris.theta_temporal);

    json doc;
    doc["rows"] = stats.rows;
    doc["rows_skipped"] = input.skipped;
    doc["binary_agreement"] = stats.binary_agreement;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    doc["sufficiency_precision"] = opt(stats.sufficiency_precision);
    doc["sufficiency_recall"] = opt(stats.sufficiency_recall);
    doc["exact_precision"] = opt(stats.exact_precision);
    doc["precision_at_0.85"] = opt(stats.precision_at_temporal);
    doc["precision_at_0.7"] = opt(stats.precision_at_general);
    doc["spearman_rho"] = opt(stats.spearman_rho);
    doc["pr_auc"] = opt(stats.pr_auc);

    *io.out << doc.dump(2) << "\n";
    if (!stats_out.empty()) {
        std::ofstream out(stats_out, std::ios::trunc);
        if (!out) {
            *io.err << "error: cannot write stats file: " << stats_out << "\n";
            return kExitUsage;
        }
        out << doc.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace recall::cli
