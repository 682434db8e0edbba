#pragma once
// Closed-loop retrieval engine: question preprocessing, dual-path retrieval
// with progressive budgets, accumulated-evidence sufficiency evaluation,
// confidence calibration, termination, and diagnosis-driven query refinement.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "recall/providers.hpp"
#include "recall/retriever.hpp"
#include "recall/types.hpp"

namespace recall {

enum class Category { SingleHop = 1, MultiHop = 2, Temporal = 3, OpenDomain = 4, Adversarial = 5 };

const char* category_name(Category c);

struct QuestionContext {
    std::string question;
    std::vector<std::string> entities;  // deduplicated case-insensitively
    bool temporal = false;
    std::string matched_keyword;  // which temporal keyword fired, if any
    std::optional<Category> category;
};

// Which tiers the stricter temporal threshold applies to. The calibration
// caps temporal INFERRABLE confidence at 0.75, so under AllTiers a temporal
// question can only ever stop on EXACT; ExactOnly lets INFERRABLE stop at
// the general threshold.
enum class TemporalThresholdScope { ExactOnly, AllTiers };

struct IrisConfig {
    int max_iterations = 3;      // k
    int base_budget = 10;        // k_top
    int budget_step = 3;         // widening per iteration
    double theta_general = 0.70;
    double theta_temporal = 0.85;
    int entity_fact_threshold = 2;  // delta
    double exact_floor = 0.85;
    double inferrable_cap = 0.75;
    double partial_cap = 0.50;
    double entity_downgrade_cap = 0.60;
    double abstention_floor = 0.15;
    TemporalThresholdScope temporal_threshold_scope = TemporalThresholdScope::ExactOnly;
    std::vector<std::string> temporal_keywords = default_temporal_keywords();
    std::size_t sufficiency_fact_cap = 60;  // most recent facts rendered per evaluation

    static std::vector<std::string> default_temporal_keywords();

    // Throws std::invalid_argument on inconsistent values. theta_temporal
    // must equal exact_floor: the floor is what guarantees temporal EXACT
    // always terminates.
    void validate() const;
};

// Ablation switches. Defaults are the full engine.
struct LoopFeatures {
    bool tiered = true;               // three-tier vs binary sufficiency
    bool temporal_adaptation = true;  // temporal detection + stricter thresholds
    bool entity_tracking = true;      // per-entity fact buffers and downgrade
    bool dual_path = true;            // anchor + refinement retrieval
    bool abstention = true;
    bool reasoning_chain = true;
};

enum class TerminationReason { Sufficient, BudgetExhausted };

struct IterationTrace {
    int iteration = 0;
    int budget = 0;
    std::vector<std::string> anchor_ids;
    std::vector<std::string> refined_ids;
    std::vector<std::string> expanded_ids;
    std::vector<std::string> new_ids;
    std::vector<std::string> ranked_turns;  // fused source-turn ranking this iteration
    SufficiencyResult raw;
    SufficiencyResult calibrated;
    std::string strategy;
    std::string entity_hint;
    std::string refined_query_after;
    std::size_t expansion_calls = 0;
    double retrieval_ms = 0.0;
    double evaluation_ms = 0.0;
    double refinement_ms = 0.0;
};

struct LoopState {
    int iteration = 0;
    std::string refined_query;           // q'; the anchor always re-uses the question
    std::vector<EvidenceItem> evidence;  // accumulated, insertion-ordered, unique ids
    std::unordered_set<std::string> evidence_ids;
    std::map<std::string, std::set<std::string>> entity_facts;
    std::vector<CallRecord> calls;
    TerminationReason terminated = TerminationReason::BudgetExhausted;
    std::vector<IterationTrace> iterations;
    std::vector<std::string> warnings;
};

// Entity extraction (capitalized-name spans unioned with LLM-extracted names
// when an extractor is given) plus rule-based temporal intent detection.
// Extractor failure degrades to regex-only with a warning.
QuestionContext preprocess(const std::string& question, LLMProvider* extractor,
                           const IrisConfig& config, std::vector<CallRecord>* calls = nullptr,
                           std::vector<std::string>* warnings = nullptr);

// Regex-only half of preprocess, exposed for tests.
std::vector<std::string> extract_entities_rule_based(const std::string& question);

// base + step * (i - 1); iteration outside [1, max_iterations] is rejected.
int retrieval_budget(const IrisConfig& config, int iteration);

// Fixed strategy string keyed on (temporal, min(iteration, 3)). Pure.
const std::string& select_strategy(bool temporal, int iteration);

// Temporal floors/caps followed by the entity-coverage downgrade. NONE passes
// the temporal stage unchanged and, when entities are sparse, receives only
// the diagnosis append (the tier stays NONE).
SufficiencyResult calibrate(const SufficiencyResult& result, const QuestionContext& ctx,
                            const LoopState& state, const IrisConfig& config,
                            const LoopFeatures& features);

// EXACT or INFERRABLE at/above the applicable threshold. PARTIAL and NONE
// never terminate.
bool sufficient(Tier tier, double confidence, const QuestionContext& ctx,
                const IrisConfig& config, const LoopFeatures& features);

// One full iteration: dual-path retrieval at the progressive budget, one-hop
// expansion, dedup into the accumulated evidence, entity tracking, then
// sufficiency evaluation over the whole evidence set plus calibration.
SufficiencyResult iterate_once(const QuestionContext& ctx, LoopState& state, Retriever& retriever,
                               LLMProvider& llm, const IrisConfig& config,
                               const LoopFeatures& features);

// Diagnosis-driven refinement; updates state.refined_query. Provider failure
// keeps the previous query and records a warning.
void refine_query(const QuestionContext& ctx, LoopState& state, const SufficiencyResult& result,
                  LLMProvider& llm, const IrisConfig& config, const LoopFeatures& features);

struct RunOutcome {
    SufficiencyResult final_result;
    LoopState state;
};

// Runs up to k iterations, stopping when sufficient or the budget is
// exhausted. No refinement call is made at i = k.
RunOutcome run(const QuestionContext& ctx, Retriever& retriever, LLMProvider& llm,
               const IrisConfig& config, const LoopFeatures& features);

}  // namespace recall
