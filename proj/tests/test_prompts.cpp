#include <doctest.h>

#include "recall/iris.hpp"
#include "recall/prompts.hpp"
#include "test_util.hpp"

using namespace recall;
using namespace recall::prompts;
using recall::test::fixture_path;
using recall::test::read_file;

namespace {

void check_golden(const LLMRequest& req, const std::string& fixture) {
    std::string expected = read_file(fixture_path("prompts/" + fixture));
    CHECK(req.user == expected);
}

}  // namespace

TEST_CASE("sufficiency prompt matches golden files") {
    SUBCASE("temporal, 20 facts") {
        std::vector<std::string> facts = {
            "Jon performed_at festival",
            "Jon loves performing",
            "Jon is rehearsing for upcoming show",
            "Jon group is preparing a new routine",
            "Jon is excited about the festival",
            "Jon leads his dance group",
            "Gina supports Jon",
            "Jon is performing with his group",
            "Jon attended a music festival",
            "Jon invited Gina to the festival show",
            "Jon practices choreography daily",
            "Jon met his group at a dance class",
            "Gina bakes sourdough bread",
            "Gina enjoys morning runs",
            "Jon thinks the stage lights are magical",
            "Jon bought new dance shoes",
            "Jon group rehearses in a garage",
            "Gina filmed one of the rehearsals",
            "Jon posted a rehearsal video online",
            "Jon thanked his group for their dedication",
        };
        auto req = render_sufficiency_prompt("When is Jon's group performing at a festival?",
                                             facts, true);
        check_golden(req, "sufficiency_temporal_case_c.txt");
        CHECK(req.system == "You are a helpful assistant that evaluates information sufficiency.");
    }
    SUBCASE("non-temporal has no TEMPORAL block") {
        auto req = render_sufficiency_prompt(
            "How do Jon and Gina both like to destress?",
            {"Gina advises take breaks and dance to destress", "Jon is collaborating with Gina",
             "Gina supports Jon"},
            false);
        check_golden(req, "sufficiency_general_case_b.txt");
        CHECK(req.user.find("TEMPORAL") == std::string::npos);
    }
    SUBCASE("empty facts keep the section present") {
        auto req =
            render_sufficiency_prompt("Why did Jon decide to start his dance studio?", {}, false);
        check_golden(req, "sufficiency_empty_facts.txt");
        CHECK(req.user.find("Retrieved Facts:\n") != std::string::npos);
    }
}

TEST_CASE("refinement prompt matches golden files") {
    SUBCASE("temporal iteration 1, no entity context") {
        auto req = render_refinement_prompt(
            "When is Jon's group performing at a festival?",
            "When is Jon's group performing at a festival?",
            "Specific date or time of Jon's performance at the festival", 1, 3,
            select_strategy(true, 1), "");
        check_golden(req, "refinement_case_c_iter1.txt");
        CHECK(req.user.find("Entity context") == std::string::npos);
    }
    SUBCASE("entity context line present when the hint is non-empty") {
        auto req = render_refinement_prompt(
            "How do Jon and Gina both like to destress?",
            "How do Jon and Gina both like to destress?",
            "how Jon destresses; only Gina's method found; need more about: Jon", 1, 3,
            select_strategy(false, 1),
            "Need more about: Jon (only 8 facts). Include entity names in query.");
        check_golden(req, "refinement_case_b_iter1.txt");
        CHECK(req.user.find("Need more about: Jon") != std::string::npos);
    }
    SUBCASE("general iteration 2") {
        auto req = render_refinement_prompt("Why did Jon decide to start his dance studio?",
                                            "Jon dance studio motivation",
                                            "what triggered the decision beyond passion", 2, 3,
                                            select_strategy(false, 2), "");
        check_golden(req, "refinement_general_iter2.txt");
    }
}

TEST_CASE("answer prompt matches golden files") {
    SUBCASE("temporal EXACT uses the precise-date block") {
        auto req = render_answer_prompt(
            "When is Jon's group performing at a festival?",
            {"Hot Steps scheduled_to_perform at the spring fest (time: 2023-02) [D1:11]",
             "Jon performed_at festival [D1:3]"},
            Tier::Exact, 0.9, true, {});
        check_golden(req, "answer_temporal_exact.txt");
        CHECK(req.user.find("Answer with the PRECISE date/time") != std::string::npos);
    }
    SUBCASE("confident block with a reasoning chain") {
        auto req = render_answer_prompt(
            "How do Jon and Gina both like to destress?",
            {"Gina advises take breaks and dance to destress [D1:2]",
             "Jon finds stress relief in dancing [D2:5]",
             "Gina unwinds with dance to destress [D1:7]"},
            Tier::Inferrable, 0.8, false,
            {"Identify how Gina destresses", "Identify how Jon destresses",
             "Connect their methods"});
        check_golden(req, "answer_confident_chain.txt");
        CHECK(req.user.find("Do NOT hedge") != std::string::npos);
    }
    SUBCASE("low-confidence fall-through") {
        auto req = render_answer_prompt("Why did Jon decide to start his dance studio?",
                                        {"Jon wants_to_start dance studio [D3:1]"}, Tier::Partial,
                                        0.3, false, {});
        check_golden(req, "answer_low_confidence.txt");
    }
}

TEST_CASE("judge prompt matches golden files") {
    check_golden(render_judge_prompt("How do Jon and Gina both like to destress?", "by dancing",
                                     "Jon and Gina both like to destress by dancing."),
                 "judge_token_match.txt");
    check_golden(render_judge_prompt("When is Jon's group performing at a festival?",
                                     "7 May 2023", "May 7, 2023"),
                 "judge_date_variants.txt");
    check_golden(
        render_judge_prompt("Why did Jon decide to start his dance studio?",
                            "He lost his job and decided to start his own business to share "
                            "his passion.",
                            "I don't know"),
        "judge_unknown_answer.txt");
}

TEST_CASE("sufficiency response parsing") {
    SUBCASE("inferrable with confidence and no missing info") {
        auto r = parse_sufficiency_response(
            "EXACT: no\nINFERRABLE: yes\nCONFIDENCE: 0.8\nMISSING: none");
        CHECK(r.tier == Tier::Inferrable);
        CHECK(r.confidence == doctest::Approx(0.8));
        CHECK(r.missing.empty());
        CHECK_FALSE(r.parse_failed);
    }
    SUBCASE("EXACT wins over INFERRABLE when both are yes") {
        auto r = parse_sufficiency_response(
            "EXACT: yes\nINFERRABLE: yes\nCONFIDENCE: 0.9\nMISSING: none");
        CHECK(r.tier == Tier::Exact);
    }
    SUBCASE("garbage maps to the fail-safe default") {
        auto r = parse_sufficiency_response("complete nonsense with no structure");
        CHECK(r.tier == Tier::Partial);
        CHECK(r.confidence == 0.0);
        CHECK(r.missing == "parse failure");
        CHECK(r.parse_failed);
    }
    SUBCASE("comma-separated single-line form") {
        auto r = parse_sufficiency_response(
            "PARTIAL: yes, CONFIDENCE: 0.4\nMISSING: how Jon destresses; only Gina's method "
            "found");
        CHECK(r.tier == Tier::Partial);
        CHECK(r.confidence == doctest::Approx(0.4));
        CHECK(r.missing == "how Jon destresses; only Gina's method found");
    }
    SUBCASE("all-no maps to NONE") {
        auto r = parse_sufficiency_response(
            "EXACT: no\nINFERRABLE: no\nPARTIAL: no\nCONFIDENCE: 0.3\nMISSING: everything");
        CHECK(r.tier == Tier::None);
        CHECK(r.missing == "everything");
    }
    SUBCASE("confidence is clamped to [0,1]") {
        auto r = parse_sufficiency_response("PARTIAL: yes\nCONFIDENCE: 7.5\nMISSING: none");
        CHECK(r.confidence == 1.0);
    }
    SUBCASE("parser never throws (totality over byte soup)") {
        const char* inputs[] = {"", "\n\n\n", "EXACT:", "EXACT: yes/no", "CONFIDENCE: ",
                                "MISSING:", "EXACT yes", "::::", "yes", "\xff\xfe garbage"};
        for (const char* s : inputs) {
            CAPTURE(s);
            CHECK_NOTHROW(parse_sufficiency_response(s));
        }
    }
}

TEST_CASE("format/parse round-trip across tiers and confidences") {
    for (Tier t : {Tier::Exact, Tier::Inferrable, Tier::Partial, Tier::None}) {
        for (double c : {0.0, 0.5, 1.0}) {
            for (std::string m : {std::string(""), std::string("dates for the show")}) {
                CAPTURE(tier_name(t));
                CAPTURE(c);
                auto parsed = parse_sufficiency_response(format_sufficiency_response(t, c, m));
                CHECK(parsed.tier == t);
                CHECK(parsed.confidence == doctest::Approx(c));
                CHECK(parsed.missing == m);
                CHECK_FALSE(parsed.parse_failed);
            }
        }
    }
}

TEST_CASE("strategy table is keyed on (temporal, min(i,3))") {
    CHECK(select_strategy(true, 1) ==
          "Focus on DATE, TIME, and temporal keywords (when, started, launched, opened).");
    CHECK(select_strategy(true, 2) ==
          "Search for specific DATE FORMATS and temporal relations (as of, after, before).");
    CHECK(select_strategy(true, 3) ==
          "Try broader temporal context: related events, milestones, timeframes.");
    CHECK(select_strategy(false, 1) ==
          "Focus on specific keywords, entity names, and key concepts.");
    CHECK(select_strategy(false, 2) ==
          "Try different angle: related events, attributes, or contextual information.");
    CHECK(select_strategy(false, 3) ==
          "Use synonyms, broader concepts, or implied relationships.");
    CHECK(select_strategy(false, 5) == select_strategy(false, 3));
    CHECK(select_strategy(true, 7) == select_strategy(true, 3));
    CHECK_THROWS_AS(select_strategy(false, 0), std::invalid_argument);
}

TEST_CASE("answer instruction selection is total over (tier, temporal, confidence)") {
    const double confidences[] = {0.0, 0.49, 0.50, 0.51, 0.74, 0.75, 0.76, 1.0};
    for (Tier t : {Tier::Exact, Tier::Inferrable, Tier::Partial, Tier::None}) {
        for (bool temporal : {false, true}) {
            for (double c : confidences) {
                CAPTURE(tier_name(t));
                CAPTURE(temporal);
                CAPTURE(c);
                const std::string& block = answer_instruction(t, c, temporal);
                CHECK_FALSE(block.empty());
                // Expected block per the selection rules.
                std::string expected;
                if (temporal && t == Tier::Exact)
                    expected = "Answer with the PRECISE";
                else if (temporal && t == Tier::Inferrable)
                    expected = "Make a careful inference";
                else if (!temporal && (t == Tier::Exact || (t == Tier::Inferrable && c >= 0.75)))
                    expected = "Answer directly and confidently";
                else if ((t == Tier::Inferrable || t == Tier::Partial) && c >= 0.50)
                    expected = "Answer based on reasonable inference";
                else
                    expected = "Answer based on available facts";
                CHECK(block.rfind(expected, 0) == 0);
            }
        }
    }
}

TEST_CASE("judge response parsing handles wrappers and rejects junk") {
    auto v = parse_judge_response("{\"score\": 1, \"reason\": \"same meaning\"}");
    REQUIRE(v.has_value());
    CHECK(v->score == 1);
    CHECK(v->reason == "same meaning");

    v = parse_judge_response("Sure! Here is the verdict:\n```json\n{\"score\": 0, \"reason\": "
                             "\"wrong\"}\n```");
    REQUIRE(v.has_value());
    CHECK(v->score == 0);

    CHECK_FALSE(parse_judge_response("the answer is correct").has_value());
    CHECK_FALSE(parse_judge_response("{\"score\": 3}").has_value());
    CHECK_FALSE(parse_judge_response("{}").has_value());
}

TEST_CASE("reasoning response parsing") {
    auto chain = parse_reasoning_response(
        "TYPE: MULTI-HOP\nStep 1: Identify how Gina destresses\nStep 2: Identify how Jon "
        "destresses\nStep 3: Connect their methods");
    CHECK(chain.multi_hop);
    REQUIRE(chain.steps.size() == 3);
    CHECK(chain.steps[2] == "Connect their methods");

    CHECK_FALSE(parse_reasoning_response("TYPE: DIRECT").multi_hop);
    CHECK_FALSE(parse_reasoning_response("word salad").multi_hop);
    // A one-step multi-hop is demoted to direct.
    CHECK_FALSE(parse_reasoning_response("TYPE: MULTI-HOP\nStep 1: only one").multi_hop);
}

TEST_CASE("extraction response parsing") {
    auto facts = parse_extraction_response(
        "Jon | lost | job\n- Jon | worked as | a banker | 2022\nbad line\n | missing | subject\n"
        "a | b | c | d | e\n");
    REQUIRE(facts.size() == 2);
    CHECK(facts[0].subject == "Jon");
    CHECK(facts[0].predicate == "lost");
    CHECK(facts[0].object == "job");
    CHECK(facts[0].time_expr.empty());
    CHECK(facts[1].time_expr == "2022");
}

TEST_CASE("entity response parsing") {
    CHECK(parse_entity_response("Jon, Gina") == std::vector<std::string>{"Jon", "Gina"});
    CHECK(parse_entity_response("none") == std::vector<std::string>{});
    CHECK(parse_entity_response("Jon\nGina; Sam") ==
          std::vector<std::string>{"Jon", "Gina", "Sam"});
}

TEST_CASE("yes/no parsing") {
    CHECK(*parse_yes_no("YES, clearly") == true);
    CHECK(*parse_yes_no("Answer: no.") == false);
    CHECK_FALSE(parse_yes_no("maybe").has_value());
}
