#include "recall/answer.hpp"

#include <chrono>
#include <unordered_set>

#include "recall/prompts.hpp"
#include "recall/text.hpp"

namespace recall {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> grounded_fact_lines(const std::vector<EvidenceItem>& evidence) {
    std::vector<std::string> lines;
    lines.reserve(evidence.size());
    for (const auto& item : evidence) lines.push_back(item.text + " [" + item.source_turn + "]");
    return lines;
}

std::vector<std::string> evidence_turns(const std::vector<EvidenceItem>& evidence) {
    std::vector<std::string> turns;
    std::unordered_set<std::string> seen;
    for (const auto& item : evidence)
        if (seen.insert(item.source_turn).second) turns.push_back(item.source_turn);
    return turns;
}

}  // namespace

bool should_abstain(const SufficiencyResult& result, const IrisConfig& config,
                    const LoopFeatures& features) {
    if (!features.abstention) return false;
    return result.tier == Tier::None || result.confidence < config.abstention_floor;
}

FinalAnswer make_abstention(const SufficiencyResult& result) {
    FinalAnswer answer;
    answer.text = kAbstainText;
    answer.abstained = true;
    answer.tier = result.tier;
    answer.confidence = result.confidence;
    return answer;
}

ReasoningChain build_reasoning_chain(const QuestionContext& ctx,
                                     const std::vector<EvidenceItem>& evidence, LLMProvider& llm,
                                     std::vector<CallRecord>* calls,
                                     std::vector<std::string>* warnings) {
    ReasoningChain chain;
    std::vector<std::string> lines;
    for (const auto& item : evidence) lines.push_back(item.text);

    auto start = Clock::now();
    std::string response;
    try {
        auto resp =
            llm.chat(prompts::render_reasoning_prompt(ctx.question, ctx.entities, lines),
                     CallRole::Reason);
        response = resp.text;
    } catch (const ProviderError& e) {
        if (calls) calls->push_back({CallRole::Reason, ms_since(start)});
        if (warnings)
            warnings->push_back(std::string("reasoning-chain analysis failed: ") + e.what());
        return chain;
    }
    if (calls) calls->push_back({CallRole::Reason, ms_since(start)});

    auto parsed = prompts::parse_reasoning_response(response);
    if (parsed.multi_hop) {
        chain.kind = ReasoningChain::Kind::MultiHop;
        chain.steps = std::move(parsed.steps);
    }
    return chain;
}

FinalAnswer generate_answer(const QuestionContext& ctx,
                            const std::vector<EvidenceItem>& evidence,
                            const SufficiencyResult& result, const ReasoningChain& chain,
                            LLMProvider& llm, const LoopFeatures& features,
                            std::vector<CallRecord>* calls) {
    bool temporal = ctx.temporal && features.temporal_adaptation;
    auto req = prompts::render_answer_prompt(ctx.question, grounded_fact_lines(evidence),
                                             result.tier, result.confidence, temporal,
                                             chain.steps);
    auto start = Clock::now();
    FinalAnswer answer;
    try {
        auto resp = llm.chat(req, CallRole::Answer);
        if (calls) calls->push_back({CallRole::Answer, ms_since(start)});
        answer.text = trim(resp.text);
        answer.tier = result.tier;
        answer.confidence = result.confidence;
        answer.evidence_turn_ids = evidence_turns(evidence);
        if (answer.text.empty()) {
            answer = make_abstention(result);
            answer.diagnostic = "answer generation returned empty text";
        }
    } catch (const ProviderError& e) {
        if (calls) calls->push_back({CallRole::Answer, ms_since(start)});
        answer = make_abstention(result);
        answer.diagnostic = std::string("answer generation failed: ") + e.what();
    }
    return answer;
}

}  // namespace recall
