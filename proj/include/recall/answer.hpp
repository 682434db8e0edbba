#pragma once
// Post-loop generation: abstention, multi-hop reasoning chains, and
// tier-adaptive answer generation over the accumulated evidence.

#include <string>
#include <vector>

#include "recall/iris.hpp"
#include "recall/providers.hpp"
#include "recall/types.hpp"

namespace recall {

// Canonical abstention text, matching the adversarial gold phrasing so
// token-level scoring of correct abstentions is meaningful.
inline const std::string kAbstainText = "Not mentioned in the conversation.";

struct ReasoningChain {
    enum class Kind { Direct, MultiHop };
    Kind kind = Kind::Direct;
    std::vector<std::string> steps;  // >= 2 steps iff MultiHop
};

struct FinalAnswer {
    std::string text;
    bool abstained = false;
    Tier tier = Tier::None;
    double confidence = 0.0;
    std::vector<std::string> evidence_turn_ids;
    std::string diagnostic;  // non-empty when the provider failed
};

// True when no tier was activated or confidence stayed below the abstention
// floor after all iterations. Always false with abstention disabled.
bool should_abstain(const SufficiencyResult& result, const IrisConfig& config,
                    const LoopFeatures& features);

FinalAnswer make_abstention(const SufficiencyResult& result);

// Asks whether multi-hop reasoning is needed; parses numbered steps. Invoked
// only for INFERRABLE/PARTIAL evidence. Parse or provider failure yields a
// direct (step-less) chain.
ReasoningChain build_reasoning_chain(const QuestionContext& ctx,
                                     const std::vector<EvidenceItem>& evidence, LLMProvider& llm,
                                     std::vector<CallRecord>* calls,
                                     std::vector<std::string>* warnings = nullptr);

// Tier-adaptive generation over the unique evidence with raw-turn grounding
// ids; provider failure turns into abstention with a diagnostic, never a
// fabricated answer.
FinalAnswer generate_answer(const QuestionContext& ctx,
                            const std::vector<EvidenceItem>& evidence,
                            const SufficiencyResult& result, const ReasoningChain& chain,
                            LLMProvider& llm, const LoopFeatures& features,
                            std::vector<CallRecord>* calls);

}  // namespace recall
