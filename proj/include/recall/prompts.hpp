#pragma once
// Prompt templates and strict parsers for structured LLM responses.
//
// The sufficiency, refinement, answer and judge templates are the fixed
// wire format of the engine: tests diff them against golden files, so any
// edit here must update the fixtures as well.

#include <optional>
#include <string>
#include <vector>

#include "recall/providers.hpp"
#include "recall/types.hpp"

namespace recall::prompts {

// --- sufficiency evaluation -------------------------------------------------

// `facts` are pre-rendered fact texts, one per line in retrieval order.
// The temporal guidance block is included iff `temporal` is set.
LLMRequest render_sufficiency_prompt(const std::string& question,
                                     const std::vector<std::string>& facts, bool temporal);

// Total parser: every input maps to a SufficiencyResult. Unparseable text
// yields the fail-safe (PARTIAL, 0.0, "parse failure") with parse_failed set
// so an unreadable evaluation can never terminate the loop.
SufficiencyResult parse_sufficiency_response(const std::string& text);

// Renders a response conforming to the sufficiency format (test round-trips,
// scripted fixtures).
std::string format_sufficiency_response(Tier tier, double confidence,
                                        const std::string& missing);

// --- query refinement --------------------------------------------------------

// `entity_hint` line is omitted entirely when the hint is empty.
LLMRequest render_refinement_prompt(const std::string& original, const std::string& current,
                                    const std::string& missing, int iteration, int max_iterations,
                                    const std::string& strategy, const std::string& entity_hint);

// --- answer generation -------------------------------------------------------

// Picks exactly one tier-adaptive instruction block from (tier, temporal,
// confidence); `reasoning_steps` are prepended as a numbered block when
// non-empty. `facts` carry grounding ids already rendered into each line.
LLMRequest render_answer_prompt(const std::string& question,
                                const std::vector<std::string>& facts, Tier tier,
                                double confidence, bool temporal,
                                const std::vector<std::string>& reasoning_steps);

// Exposed for the exhaustive instruction-block table test.
const std::string& answer_instruction(Tier tier, double confidence, bool temporal);

// --- LLM-as-judge ------------------------------------------------------------

LLMRequest render_judge_prompt(const std::string& question, const std::string& truth,
                               const std::string& prediction);

struct JudgeVerdict {
    int score = 0;  // 0 or 1
    std::string reason;
};

std::optional<JudgeVerdict> parse_judge_response(const std::string& text);

// --- multi-hop reasoning chain ----------------------------------------------

LLMRequest render_reasoning_prompt(const std::string& question,
                                   const std::vector<std::string>& entities,
                                   const std::vector<std::string>& facts);

struct ParsedChain {
    bool multi_hop = false;
    std::vector<std::string> steps;
};

ParsedChain parse_reasoning_response(const std::string& text);

// --- tuple extraction (ingestion) ---------------------------------------------

LLMRequest render_extraction_prompt(const std::string& speaker, const std::string& timestamp,
                                    const std::string& text);

struct ExtractedFact {
    std::string subject;
    std::string predicate;
    std::string object;
    std::string time_expr;  // raw temporal expression, may be empty
};

std::vector<ExtractedFact> parse_extraction_response(const std::string& text);

// --- question entity extraction -----------------------------------------------

LLMRequest render_entity_prompt(const std::string& question);

std::vector<std::string> parse_entity_response(const std::string& text);

// --- evidence-coverage inference check (oracle arm) ---------------------------

LLMRequest render_inference_check_prompt(const std::string& question,
                                         const std::string& gold_answer,
                                         const std::vector<std::string>& facts);

std::optional<bool> parse_yes_no(const std::string& text);

}  // namespace recall::prompts
