#include "recall/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace recall {

namespace {

using Clock = std::chrono::steady_clock;

// Single-pass baseline: one retrieval round with expansion, direct answer.
QuestionRun run_single_pass(const QuestionContext& ctx, Retriever& retriever,
                            const PipelineProviders& providers, const IrisConfig& config,
                            const LoopFeatures& loop) {
    QuestionRun run;
    run.ctx = ctx;
    run.single_pass = true;
    run.state.refined_query = ctx.question;
    run.state.iteration = 1;

    IterationTrace tr;
    tr.iteration = 1;
    tr.budget = config.base_budget;
    auto items = retriever.retrieve(ctx.question, config.base_budget);
    for (const auto& it : items) tr.anchor_ids.push_back(it.id);
    auto expanded = retriever.expand(items);
    for (const auto& it : expanded) tr.expanded_ids.push_back(it.id);
    tr.expansion_calls = retriever.expansions_performed();
    auto absorb = [&](const std::vector<EvidenceItem>& list) {
        for (const auto& item : list) {
            if (run.state.evidence_ids.insert(item.id).second) {
                tr.new_ids.push_back(item.id);
                run.state.evidence.push_back(item);
            }
            if (std::find(tr.ranked_turns.begin(), tr.ranked_turns.end(), item.source_turn) ==
                tr.ranked_turns.end())
                tr.ranked_turns.push_back(item.source_turn);
        }
    };
    absorb(items);
    absorb(expanded);
    run.state.iterations.push_back(std::move(tr));
    run.state.terminated = TerminationReason::BudgetExhausted;

    // Direct, confident generation; no sufficiency signal exists here.
    run.final_result = SufficiencyResult{Tier::Exact, 1.0, "", false};
    ReasoningChain chain;
    run.answer = generate_answer(ctx, run.state.evidence, run.final_result, chain,
                                 *providers.llm, loop, &run.state.calls);
    return run;
}

}  // namespace

QuestionRun answer_question(const QuestionContext& ctx, Retriever& retriever,
                            const PipelineProviders& providers, const IrisConfig& config,
                            const PipelineFeatures& features) {
    auto start = Clock::now();
    QuestionRun run;
    if (!features.iterate) {
        run = run_single_pass(ctx, retriever, providers, config, features.loop);
    } else {
        run.ctx = ctx;
        auto outcome = recall::run(ctx, retriever, *providers.llm, config, features.loop);
        run.final_result = outcome.final_result;
        run.state = std::move(outcome.state);

        if (should_abstain(run.final_result, config, features.loop)) {
            run.answer = make_abstention(run.final_result);
        } else {
            ReasoningChain chain;
            if (features.loop.reasoning_chain &&
                (run.final_result.tier == Tier::Inferrable ||
                 run.final_result.tier == Tier::Partial)) {
                chain = build_reasoning_chain(ctx, run.state.evidence, *providers.llm,
                                              &run.state.calls, &run.state.warnings);
            }
            run.answer = generate_answer(ctx, run.state.evidence, run.final_result, chain,
                                         *providers.llm, features.loop, &run.state.calls);
        }
    }
    run.total_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return run;
}

QuestionRun answer_question(const std::string& question, Retriever& retriever,
                            const PipelineProviders& providers, const IrisConfig& config,
                            const PipelineFeatures& features) {
    QuestionRun partial;
    QuestionContext ctx = preprocess(question, providers.entity_extractor, config,
                                     &partial.state.calls, &partial.state.warnings);
    QuestionRun run = answer_question(ctx, retriever, providers, config, features);
    // Keep the preprocessing extract call in the per-question accounting.
    run.state.calls.insert(run.state.calls.begin(), partial.state.calls.begin(),
                           partial.state.calls.end());
    run.state.warnings.insert(run.state.warnings.begin(), partial.state.warnings.begin(),
                              partial.state.warnings.end());
    return run;
}

}  // namespace recall
