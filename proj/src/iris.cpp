#include "recall/iris.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <stdexcept>
#include <unordered_map>

#include "recall/prompts.hpp"
#include "recall/text.hpp"

namespace recall {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Month and weekday names look like entities to the capitalization rule but
// never are ones worth tracking.
const std::set<std::string>& calendar_words() {
    static const std::set<std::string> words = {
        "january", "february", "march",     "april",   "may",      "june",
        "july",    "august",   "september", "october", "november", "december",
        "monday",  "tuesday",  "wednesday", "thursday", "friday",  "saturday",
        "sunday"};
    return words;
}

bool effective_temporal(const QuestionContext& ctx, const LoopFeatures& features) {
    return ctx.temporal && features.temporal_adaptation;
}

}  // namespace

const char* category_name(Category c) {
    switch (c) {
        case Category::SingleHop: return "single-hop";
        case Category::MultiHop: return "multi-hop";
        case Category::Temporal: return "temporal";
        case Category::OpenDomain: return "open-domain";
        case Category::Adversarial: return "adversarial";
    }
    return "?";
}

std::vector<std::string> IrisConfig::default_temporal_keywords() {
    return {"when",  "date",  "year",  "month", "time",       "how long",
            "before", "after", "while", "since", "until",      "first time",
            "last time"};
}

void IrisConfig::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (base_budget < 1) throw std::invalid_argument("base_budget must be >= 1");
    if (budget_step < 0) throw std::invalid_argument("budget_step must be >= 0");
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (double v : {theta_general, theta_temporal, exact_floor, inferrable_cap, partial_cap,
                     entity_downgrade_cap, abstention_floor})
        if (!in_unit(v)) throw std::invalid_argument("thresholds must be in [0,1]");
    if (entity_fact_threshold < 0)
        throw std::invalid_argument("entity_fact_threshold must be >= 0");
    if (theta_temporal != exact_floor)
        throw std::invalid_argument(
            "theta_temporal must equal exact_floor (temporal EXACT must always terminate)");
}

std::vector<std::string> extract_entities_rule_based(const std::string& question) {
    std::vector<std::string> entities;
    std::set<std::string> seen;  // lowercased

    // Split into words, keeping letters and apostrophes together.
    struct Word {
        std::string text;
        bool capitalized;
    };
    std::vector<Word> words;
    std::string cur;
    auto flush = [&]() {
        if (cur.empty()) return;
        // Strip possessive suffixes ("Jon's" -> "Jon", "James'" -> "James").
        if (cur.size() > 2 && cur.ends_with("'s")) cur.resize(cur.size() - 2);
        if (cur.size() > 1 && cur.back() == '\'') cur.pop_back();
        bool cap = !cur.empty() && std::isupper(static_cast<unsigned char>(cur[0]));
        words.push_back({cur, cap});
        cur.clear();
    };
    for (char c : question) {
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '\'') {
            cur.push_back(c);
        } else {
            flush();
        }
    }
    flush();

    // Capitalized spans, skipping the sentence-initial word, single "I", and
    // calendar words.
    for (std::size_t i = 1; i < words.size(); ++i) {
        if (!words[i].capitalized) continue;
        std::string span = words[i].text;
        std::size_t j = i + 1;
        while (j < words.size() && words[j].capitalized) {
            span += " " + words[j].text;
            ++j;
        }
        i = j - 1;
        if (span == "I") continue;
        std::string lower = to_lower(span);
        if (calendar_words().count(lower)) continue;
        if (seen.insert(lower).second) entities.push_back(span);
    }
    return entities;
}

QuestionContext preprocess(const std::string& question, LLMProvider* extractor,
                           const IrisConfig& config, std::vector<CallRecord>* calls,
                           std::vector<std::string>* warnings) {
    if (trim(question).empty()) throw std::invalid_argument("question must be non-empty");

    QuestionContext ctx;
    ctx.question = question;
    ctx.entities = extract_entities_rule_based(question);

    std::set<std::string> seen;
    for (const auto& e : ctx.entities) seen.insert(to_lower(e));

    if (extractor) {
        try {
            auto start = Clock::now();
            auto resp = extractor->chat(prompts::render_entity_prompt(question),
                                        CallRole::Extract);
            if (calls) calls->push_back({CallRole::Extract, ms_since(start)});
            for (const auto& name : prompts::parse_entity_response(resp.text)) {
                if (seen.insert(to_lower(name)).second) ctx.entities.push_back(name);
            }
        } catch (const ProviderError& e) {
            if (warnings)
                warnings->push_back(std::string("entity extraction failed: ") + e.what());
        }
    }

    auto q_tokens = tokenize(question);
    for (const auto& kw : config.temporal_keywords) {
        if (contains_token_seq(q_tokens, tokenize(kw))) {
            ctx.temporal = true;
            ctx.matched_keyword = kw;
            break;
        }
    }
    return ctx;
}

int retrieval_budget(const IrisConfig& config, int iteration) {
    if (iteration < 1 || iteration > config.max_iterations)
        throw std::invalid_argument("iteration out of range [1, k]");
    return config.base_budget + config.budget_step * (iteration - 1);
}

const std::string& select_strategy(bool temporal, int iteration) {
    if (iteration < 1) throw std::invalid_argument("iteration must be >= 1");
    static const std::string temporal_strategies[3] = {
        "Focus on DATE, TIME, and temporal keywords (when, started, launched, opened).",
        "Search for specific DATE FORMATS and temporal relations (as of, after, before).",
        "Try broader temporal context: related events, milestones, timeframes.",
    };
    static const std::string general_strategies[3] = {
        "Focus on specific keywords, entity names, and key concepts.",
        "Try different angle: related events, attributes, or contextual information.",
        "Use synonyms, broader concepts, or implied relationships.",
    };
    int idx = std::min(iteration, 3) - 1;
    return temporal ? temporal_strategies[idx] : general_strategies[idx];
}

namespace {

std::vector<std::string> sparse_entities(const QuestionContext& ctx, const LoopState& state,
                                         const IrisConfig& config) {
    std::vector<std::string> sparse;
    for (const auto& e : ctx.entities) {
        auto it = state.entity_facts.find(e);
        std::size_t count = it == state.entity_facts.end() ? 0 : it->second.size();
        if (count < std::size_t(config.entity_fact_threshold)) sparse.push_back(e);
    }
    return sparse;
}

}  // namespace

SufficiencyResult calibrate(const SufficiencyResult& result, const QuestionContext& ctx,
                            const LoopState& state, const IrisConfig& config,
                            const LoopFeatures& features) {
    SufficiencyResult r = result;

    if (effective_temporal(ctx, features)) {
        switch (r.tier) {
            case Tier::Exact:
                r.confidence = std::max(r.confidence, config.exact_floor);
                break;
            case Tier::Inferrable:
                r.confidence = std::min(r.confidence, config.inferrable_cap);
                break;
            case Tier::Partial:
                r.confidence = std::min(r.confidence, config.partial_cap);
                break;
            case Tier::None:
                break;
        }
    }

    if (features.entity_tracking) {
        auto sparse = sparse_entities(ctx, state, config);
        if (!sparse.empty()) {
            if (r.tier != Tier::None) {
                r.tier = Tier::Partial;
                r.confidence = std::min(r.confidence, config.entity_downgrade_cap);
            }
            std::string note = "need more about: " + join(sparse, ", ");
            r.missing = r.missing.empty() ? note : r.missing + "; " + note;
        }
    }
    return r;
}

bool sufficient(Tier tier, double confidence, const QuestionContext& ctx,
                const IrisConfig& config, const LoopFeatures& features) {
    if (tier != Tier::Exact && tier != Tier::Inferrable) return false;
    double theta = config.theta_general;
    if (effective_temporal(ctx, features) &&
        (tier == Tier::Exact ||
         config.temporal_threshold_scope == TemporalThresholdScope::AllTiers))
        theta = config.theta_temporal;
    return confidence >= theta;
}

SufficiencyResult iterate_once(const QuestionContext& ctx, LoopState& state, Retriever& retriever,
                               LLMProvider& llm, const IrisConfig& config,
                               const LoopFeatures& features) {
    state.iteration += 1;
    const int i = state.iteration;

    IterationTrace tr;
    tr.iteration = i;
    tr.budget = retrieval_budget(config, i);

    auto retrieval_start = Clock::now();
    std::vector<EvidenceItem> anchor;
    if (features.dual_path) anchor = retriever.retrieve(ctx.question, tr.budget);
    std::vector<EvidenceItem> refined = retriever.retrieve(state.refined_query, tr.budget);

    for (const auto& it : anchor) tr.anchor_ids.push_back(it.id);
    for (const auto& it : refined) tr.refined_ids.push_back(it.id);

    // Best-rank fusion of the two paths (anchor wins ties), then expansion.
    struct Fused {
        EvidenceItem item;
        std::size_t best_rank;
        int path;  // 0 anchor, 1 refined
    };
    std::vector<Fused> fused;
    std::unordered_map<std::string, std::size_t> pos;
    auto fuse = [&](const std::vector<EvidenceItem>& list, int path) {
        for (std::size_t r = 0; r < list.size(); ++r) {
            auto it = pos.find(list[r].id);
            if (it == pos.end()) {
                pos[list[r].id] = fused.size();
                fused.push_back({list[r], r, path});
            } else if (r < fused[it->second].best_rank) {
                fused[it->second].best_rank = r;
            }
        }
    };
    fuse(anchor, 0);
    fuse(refined, 1);
    std::stable_sort(fused.begin(), fused.end(), [](const Fused& a, const Fused& b) {
        if (a.best_rank != b.best_rank) return a.best_rank < b.best_rank;
        if (a.path != b.path) return a.path < b.path;
        return a.item.id < b.item.id;
    });

    std::vector<EvidenceItem> merged;
    merged.reserve(fused.size());
    for (auto& f : fused) merged.push_back(std::move(f.item));

    std::size_t expand_calls_before = retriever.expansions_performed();
    std::vector<EvidenceItem> expanded = retriever.expand(merged);
    tr.expansion_calls = retriever.expansions_performed() - expand_calls_before;
    for (const auto& it : expanded) tr.expanded_ids.push_back(it.id);

    // This iteration's deduplicated evidence, ranked items first.
    std::vector<EvidenceItem> iteration_items = merged;
    {
        std::unordered_set<std::string> in_iter;
        for (const auto& it : merged) in_iter.insert(it.id);
        for (const auto& it : expanded)
            if (in_iter.insert(it.id).second) iteration_items.push_back(it);
    }

    {
        std::unordered_set<std::string> seen_turns;
        for (const auto& item : iteration_items)
            if (seen_turns.insert(item.source_turn).second)
                tr.ranked_turns.push_back(item.source_turn);
    }

    for (const auto& item : iteration_items) {
        if (state.evidence_ids.insert(item.id).second) {
            tr.new_ids.push_back(item.id);
            state.evidence.push_back(item);
        }
    }

    if (features.entity_tracking) {
        for (const auto& e : ctx.entities) {
            auto& bucket = state.entity_facts[e];
            for (const auto& item : iteration_items)
                if (entity_matches(item.entity_scope, e)) bucket.insert(item.id);
        }
    }
    tr.retrieval_ms = ms_since(retrieval_start);

    // Sufficiency over the whole accumulated set, capped to the most recent
    // facts when it outgrows the render limit.
    std::vector<std::string> fact_lines;
    std::size_t begin = state.evidence.size() > config.sufficiency_fact_cap
                            ? state.evidence.size() - config.sufficiency_fact_cap
                            : 0;
    for (std::size_t idx = begin; idx < state.evidence.size(); ++idx)
        fact_lines.push_back(state.evidence[idx].text);

    auto eval_start = Clock::now();
    SufficiencyResult raw;
    try {
        auto req = prompts::render_sufficiency_prompt(ctx.question, fact_lines,
                                                      effective_temporal(ctx, features));
        auto resp = llm.chat(req, CallRole::Sufficiency);
        state.calls.push_back({CallRole::Sufficiency, ms_since(eval_start)});
        raw = prompts::parse_sufficiency_response(resp.text);
    } catch (const ProviderError& e) {
        state.calls.push_back({CallRole::Sufficiency, ms_since(eval_start)});
        state.warnings.push_back(std::string("sufficiency evaluation failed: ") + e.what());
        raw = SufficiencyResult{Tier::Partial, 0.0, "provider failure", true};
    }
    if (!features.tiered) {
        // Binary sufficiency: collapse to sufficient/insufficient.
        raw.tier = (raw.tier == Tier::Exact || raw.tier == Tier::Inferrable) ? Tier::Exact
                                                                             : Tier::Partial;
    }
    tr.raw = raw;

    SufficiencyResult calibrated = calibrate(raw, ctx, state, config, features);
    tr.calibrated = calibrated;
    tr.evaluation_ms = ms_since(eval_start);

    state.iterations.push_back(std::move(tr));
    return calibrated;
}

void refine_query(const QuestionContext& ctx, LoopState& state, const SufficiencyResult& result,
                  LLMProvider& llm, const IrisConfig& config, const LoopFeatures& features) {
    std::string hint;
    if (features.entity_tracking) {
        auto sparse = sparse_entities(ctx, state, config);
        if (!sparse.empty()) {
            std::vector<std::string> parts;
            for (const auto& e : sparse) {
                auto it = state.entity_facts.find(e);
                std::size_t n = it == state.entity_facts.end() ? 0 : it->second.size();
                parts.push_back(e + " (only " + std::to_string(n) +
                                (n == 1 ? " fact)" : " facts)"));
            }
            hint = "Need more about: " + join(parts, ", ") + ". Include entity names in query.";
        }
    }

    bool temporal = effective_temporal(ctx, features);
    const std::string& strategy = select_strategy(temporal, state.iteration);
    if (!state.iterations.empty()) {
        state.iterations.back().strategy = strategy;
        state.iterations.back().entity_hint = hint;
    }

    auto req = prompts::render_refinement_prompt(
        ctx.question, state.refined_query,
        result.missing.empty() ? std::string("none") : result.missing, state.iteration,
        config.max_iterations, strategy, hint);

    auto start = Clock::now();
    try {
        auto resp = llm.chat(req, CallRole::Refine);
        state.calls.push_back({CallRole::Refine, ms_since(start)});
        std::string query;
        for (const auto& line : split_lines(resp.text)) {
            query = trim(line);
            if (!query.empty()) break;
        }
        if (query.empty()) {
            state.warnings.push_back("refinement returned an empty query; keeping previous");
        } else {
            state.refined_query = query;
        }
    } catch (const ProviderError& e) {
        state.calls.push_back({CallRole::Refine, ms_since(start)});
        state.warnings.push_back(std::string("refinement failed: ") + e.what());
    }
    if (!state.iterations.empty())
        state.iterations.back().refined_query_after = state.refined_query;
}

RunOutcome run(const QuestionContext& ctx, Retriever& retriever, LLMProvider& llm,
               const IrisConfig& config, const LoopFeatures& features) {
    config.validate();
    RunOutcome outcome;
    outcome.state.refined_query = ctx.question;

    for (int i = 1; i <= config.max_iterations; ++i) {
        outcome.final_result =
            iterate_once(ctx, outcome.state, retriever, llm, config, features);
        if (sufficient(outcome.final_result.tier, outcome.final_result.confidence, ctx, config,
                       features)) {
            outcome.state.terminated = TerminationReason::Sufficient;
            break;
        }
        if (i == config.max_iterations) {
            outcome.state.terminated = TerminationReason::BudgetExhausted;
            break;
        }
        refine_query(ctx, outcome.state, outcome.final_result, llm, config, features);
    }
    return outcome;
}

}  // namespace recall
