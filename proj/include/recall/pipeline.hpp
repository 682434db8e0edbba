#pragma once
// End-to-end question answering: preprocessing, the retrieval loop, and
// post-loop generation, with per-question call accounting.

#include <string>
#include <vector>

#include "recall/answer.hpp"
#include "recall/iris.hpp"
#include "recall/providers.hpp"
#include "recall/retriever.hpp"

namespace recall {

struct PipelineProviders {
    LLMProvider* llm = nullptr;               // sufficiency/refinement/reasoning/answer
    LLMProvider* entity_extractor = nullptr;  // optional; null = rule-based entities only
};

struct QuestionRun {
    QuestionContext ctx;
    SufficiencyResult final_result;
    FinalAnswer answer;
    LoopState state;
    bool single_pass = false;
    double total_ms = 0.0;

    std::size_t llm_calls() const { return state.calls.size(); }
    int iterations() const { return state.iteration; }
};

// Full pipeline. With features.iterate == false (the single-pass variant) it
// performs one retrieval at the base budget plus expansion and answers
// directly, with no sufficiency evaluation.
struct PipelineFeatures {
    bool iterate = true;
    LoopFeatures loop;
};

QuestionRun answer_question(const std::string& question, Retriever& retriever,
                            const PipelineProviders& providers, const IrisConfig& config,
                            const PipelineFeatures& features);

// Variant taking a prebuilt context (when preprocessing happened elsewhere).
QuestionRun answer_question(const QuestionContext& ctx, Retriever& retriever,
                            const PipelineProviders& providers, const IrisConfig& config,
                            const PipelineFeatures& features);

}  // namespace recall
