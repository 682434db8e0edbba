#include <doctest.h>

#include "recall/answer.hpp"
#include "recall/pipeline.hpp"

using namespace recall;

namespace {

EvidenceItem item(const std::string& id, const std::string& text, const std::string& turn) {
    EvidenceItem e;
    e.id = id;
    e.text = text;
    e.source_turn = turn;
    e.entity_scope = text;
    return e;
}

QuestionContext make_ctx(const std::string& q, bool temporal = false) {
    QuestionContext ctx;
    ctx.question = q;
    ctx.temporal = temporal;
    return ctx;
}

}  // namespace

TEST_CASE("abstention fires on NONE or a confidence below the floor") {
    IrisConfig config;
    LoopFeatures features;
    CHECK(should_abstain({Tier::None, 0.0, "", false}, config, features));
    CHECK_FALSE(should_abstain({Tier::Partial, 0.5, "", false}, config, features));

    SUBCASE("boundary at the floor") {
        CHECK(should_abstain({Tier::Partial, 0.15 - 1e-9, "", false}, config, features));
        CHECK_FALSE(should_abstain({Tier::Partial, 0.15, "", false}, config, features));
        CHECK_FALSE(should_abstain({Tier::Partial, 0.15 + 1e-9, "", false}, config, features));
    }
    SUBCASE("disabled abstention never abstains") {
        features.abstention = false;
        CHECK_FALSE(should_abstain({Tier::None, 0.0, "", false}, config, features));
    }
}

TEST_CASE("abstention answers use the canonical string") {
    auto answer = make_abstention({Tier::None, 0.05, "", false});
    CHECK(answer.abstained);
    CHECK(answer.text == kAbstainText);
    CHECK(answer.text == "Not mentioned in the conversation.");
    CHECK(answer.evidence_turn_ids.empty());
}

TEST_CASE("reasoning chain parses multi-hop steps and degrades to direct") {
    auto ctx = make_ctx("How do Jon and Gina both like to destress?");
    std::vector<EvidenceItem> evidence = {item("a", "Gina dances to destress", "T1")};
    std::vector<CallRecord> calls;

    SUBCASE("multi-hop steps from the Case B script") {
        ScriptedProvider llm({{CallRole::Reason, "",
                               "TYPE: MULTI-HOP\nStep 1: Identify how Gina destresses\nStep 2: "
                               "Identify how Jon destresses\nStep 3: Connect their methods"}},
                             true);
        auto chain = build_reasoning_chain(ctx, evidence, llm, &calls);
        CHECK(chain.kind == ReasoningChain::Kind::MultiHop);
        REQUIRE(chain.steps.size() == 3);
        CHECK(chain.steps.back() == "Connect their methods");
        REQUIRE(calls.size() == 1);
        CHECK(calls[0].role == CallRole::Reason);
    }
    SUBCASE("direct response carries no steps") {
        ScriptedProvider llm({{CallRole::Reason, "", "TYPE: DIRECT"}}, true);
        auto chain = build_reasoning_chain(ctx, evidence, llm, &calls);
        CHECK(chain.kind == ReasoningChain::Kind::Direct);
        CHECK(chain.steps.empty());
    }
    SUBCASE("garbage parses as direct") {
        ScriptedProvider llm({{CallRole::Reason, "", "???"}}, true);
        auto chain = build_reasoning_chain(ctx, evidence, llm, &calls);
        CHECK(chain.kind == ReasoningChain::Kind::Direct);
    }
    SUBCASE("provider failure parses as direct with a warning") {
        ScriptedProvider llm({}, true);
        std::vector<std::string> warnings;
        auto chain = build_reasoning_chain(ctx, evidence, llm, &calls, &warnings);
        CHECK(chain.kind == ReasoningChain::Kind::Direct);
        CHECK(warnings.size() == 1);
    }
}

TEST_CASE("generate_answer grounds evidence turns and carries tier/confidence through") {
    auto ctx = make_ctx("Why did Jon decide to start his dance studio?");
    std::vector<EvidenceItem> evidence = {item("a", "Jon lost job", "D1:4"),
                                          item("b", "Jon loves dance", "D1:7"),
                                          item("c", "Jon quit banking", "D1:4")};
    SufficiencyResult result{Tier::Inferrable, 0.8, "", false};
    ReasoningChain chain;
    std::vector<CallRecord> calls;

    ScriptedProvider llm({{CallRole::Answer, "", "Jon lost his job and started the studio."}},
                         true);
    LoopFeatures features;
    auto answer = generate_answer(ctx, evidence, result, chain, llm, features, &calls);

    CHECK_FALSE(answer.abstained);
    CHECK(answer.text == "Jon lost his job and started the studio.");
    CHECK(answer.tier == Tier::Inferrable);
    CHECK(answer.confidence == doctest::Approx(0.8));
    CHECK(answer.evidence_turn_ids == std::vector<std::string>{"D1:4", "D1:7"});
    REQUIRE(calls.size() == 1);
    CHECK(calls[0].role == CallRole::Answer);
}

TEST_CASE("answer provider failure becomes an abstention with a diagnostic") {
    auto ctx = make_ctx("q");
    ScriptedProvider llm({}, true);
    std::vector<CallRecord> calls;
    LoopFeatures features;
    auto answer = generate_answer(ctx, {}, {Tier::Partial, 0.5, "", false}, {}, llm, features,
                                  &calls);
    CHECK(answer.abstained);
    CHECK(answer.text == kAbstainText);
    CHECK_FALSE(answer.diagnostic.empty());
}

TEST_CASE("abstention exclusivity: exactly one of abstained/text-from-llm holds") {
    auto abstained = make_abstention({Tier::None, 0.0, "", false});
    CHECK(abstained.abstained);
    CHECK(abstained.text == kAbstainText);

    auto ctx = make_ctx("q");
    ScriptedProvider llm({{CallRole::Answer, "", "generated"}}, true);
    LoopFeatures features;
    auto generated = generate_answer(ctx, {item("a", "fact", "T1")},
                                     {Tier::Exact, 0.9, "", false}, {}, llm, features, nullptr);
    CHECK_FALSE(generated.abstained);
    CHECK_FALSE(generated.text.empty());
}

TEST_CASE("pipeline gates the reasoning chain on tier") {
    IrisConfig config;
    PipelineFeatures features;

    // Retriever serving one fact for every query.
    class OneItemRetriever final : public Retriever {
    public:
        std::vector<EvidenceItem> retrieve(const std::string&, std::size_t) override {
            return {item("a", "Jon dances with Gina", "T1")};
        }
        std::vector<EvidenceItem> expand(const std::vector<EvidenceItem>&) override {
            return {};
        }
    } retriever;

    SUBCASE("EXACT answers skip chain construction (exactly 2 calls)") {
        ScriptedProvider llm(
            {
                {CallRole::Sufficiency, "", "EXACT: yes\nCONFIDENCE: 0.9\nMISSING: none"},
                {CallRole::Answer, "", "the answer"},
            },
            true);
        PipelineProviders providers{&llm, nullptr};
        auto run = answer_question("Does Jon dance?", retriever, providers, config, features);
        CHECK(run.answer.text == "the answer");
        CHECK(run.llm_calls() == 2);
        std::vector<CallRole> roles;
        for (const auto& c : run.state.calls) roles.push_back(c.role);
        CHECK(roles == std::vector<CallRole>{CallRole::Sufficiency, CallRole::Answer});
    }
    SUBCASE("INFERRABLE answers build a chain first") {
        ScriptedProvider llm(
            {
                {CallRole::Sufficiency, "", "INFERRABLE: yes\nCONFIDENCE: 0.8\nMISSING: none"},
                {CallRole::Reason, "", "TYPE: DIRECT"},
                {CallRole::Answer, "", "the answer"},
            },
            true);
        PipelineProviders providers{&llm, nullptr};
        auto run = answer_question("Does Jon dance?", retriever, providers, config, features);
        CHECK(run.llm_calls() == 3);
        CHECK(run.state.calls[1].role == CallRole::Reason);
    }
    SUBCASE("NONE abstains without generation") {
        std::vector<ScriptedProvider::Entry> entries;
        for (int i = 0; i < 3; ++i)
            entries.push_back({CallRole::Sufficiency, "",
                               "EXACT: no\nINFERRABLE: no\nPARTIAL: no\nCONFIDENCE: 0.0\n"
                               "MISSING: everything"});
        for (int i = 0; i < 2; ++i) entries.push_back({CallRole::Refine, "", "query"});
        ScriptedProvider llm(std::move(entries), true);
        PipelineProviders providers{&llm, nullptr};
        auto run = answer_question("Does Jon dance?", retriever, providers, config, features);
        CHECK(run.answer.abstained);
        CHECK(run.answer.text == kAbstainText);
        CHECK(run.llm_calls() == 5);  // 3 sufficiency + 2 refine, no reason/answer
    }
    SUBCASE("single-pass variant answers directly with one call") {
        features.iterate = false;
        ScriptedProvider llm({{CallRole::Answer, "", "direct answer"}}, true);
        PipelineProviders providers{&llm, nullptr};
        auto run = answer_question("Does Jon dance?", retriever, providers, config, features);
        CHECK(run.single_pass);
        CHECK(run.answer.text == "direct answer");
        CHECK(run.llm_calls() == 1);
        CHECK(run.state.iterations.size() == 1);
    }
}

TEST_CASE("grounding closure: every evidence turn id resolves through the raw layer") {
    MemoryStore store;
    store.add_turn(RawTurn{"T1", "Jon", "", "turn one"});
    store.add_turn(RawTurn{"T2", "Gina", "", "turn two"});
    store.add_tuple("Jon", "likes", "dance", "", "T1", {1.0, 0.0});
    store.add_tuple("Gina", "likes", "dance", "", "T2", {0.9, 0.1});

    HashEmbeddingProvider embedder(2);
    (void)embedder;
    TupleRetriever retriever(store, embedder, true);

    IrisConfig config;
    PipelineFeatures features;
    ScriptedProvider llm(
        {
            {CallRole::Sufficiency, "", "EXACT: yes\nCONFIDENCE: 0.9\nMISSING: none"},
            {CallRole::Answer, "", "dance"},
        },
        true);
    PipelineProviders providers{&llm, nullptr};
    auto run = answer_question("What do Jon and Gina like?", retriever, providers, config,
                               features);
    for (const auto& turn_id : run.answer.evidence_turn_ids) {
        CHECK(store.find_turn(turn_id) != nullptr);
    }
    CHECK_FALSE(run.answer.evidence_turn_ids.empty());
}
