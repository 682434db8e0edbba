#include "recall/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <regex>

#include <nlohmann/json.hpp>

#include "recall/text.hpp"

namespace recall::prompts {

namespace {

const std::string kSufficiencySystem =
    "You are a helpful assistant that evaluates information sufficiency.";
const std::string kRefinementSystem =
    "You are a helpful assistant that refines search queries.";
const std::string kAnswerSystem =
    "You are a helpful assistant that answers questions based on provided facts.";

const std::string kTemporalBlock =
    "IMPORTANT: This is a TEMPORAL question asking for specific dates/times.\n"
    "- EXACT_MATCH: Has precise date/time (e.g., \"January 19, 2023\")\n"
    "- INFERRABLE: Has temporal clues that allow reasonable inference\n"
    "  * \"as of February 2023\" -> event likely in February 2023\n"
    "  * \"after opening in January\" -> subsequent events after January\n"
    "- PARTIAL_MATCH: Has related but insufficient temporal information\n"
    "- Vague terms like \"recently\" are PARTIAL, not EXACT.\n";

const std::string kEvaluateBlock =
    "Evaluate if these facts can answer the question:\n"
    "1. EXACT_MATCH:    Can answer precisely?            (yes/no)\n"
    "2. INFERRABLE:     Can reasonably infer the answer? (yes/no)\n"
    "3. PARTIAL_MATCH:  Related but insufficient?        (yes/no)\n"
    "4. CONFIDENCE:     0.0-1.0\n"
    "5. MISSING:        what specific information is missing? (or \"none\")\n"
    "\n"
    "Respond in EXACTLY this format:\n"
    "EXACT: yes/no\n"
    "INFERRABLE: yes/no\n"
    "PARTIAL: yes/no\n"
    "CONFIDENCE: 0.0-1.0\n"
    "MISSING: <missing information or \"none\">";

// Tier-adaptive instruction blocks for answer generation.
const std::string kInstrTemporalExact =
    "Answer with the PRECISE date/time. Use formats like \"January 19, 2023\" or "
    "\"2023-01-19\". Do NOT use vague terms like \"around\" or \"approximately\".";
const std::string kInstrTemporalInferrable =
    "Make a careful inference from temporal clues. Use \"in\" or \"around\" if inferring "
    "timeframe; do NOT overuse \"it is likely that\" or \"based on the facts\".";
const std::string kInstrConfident =
    "Answer directly and confidently. Do NOT hedge with \"likely\", \"it seems\", "
    "\"probably\", \"based on the facts\".";
const std::string kInstrReasoned =
    "Answer based on reasonable inference. Use \"Based on the facts, [answer]\" or state "
    "the answer with brief reasoning. Avoid overusing uncertainty markers.";
const std::string kInstrLowConfidence =
    "Answer based on available facts. If key information is missing, state it concisely.";

std::string render_fact_lines(const std::vector<std::string>& facts) {
    std::string out;
    for (const auto& f : facts) {
        out += "- ";
        out += f;
        out += '\n';
    }
    return out;
}

std::string format_confidence(double c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", c);
    return buf;
}

// Case-insensitive search for "label:" at a position not preceded by an
// alphanumeric character (so "EXACT:" is not found inside "INEXACT:").
std::optional<std::size_t> find_label(const std::string& text, const std::string& label) {
    std::string lower = to_lower(text);
    std::string needle = to_lower(label) + ":";
    std::size_t pos = 0;
    while ((pos = lower.find(needle, pos)) != std::string::npos) {
        if (pos == 0 || !std::isalnum(static_cast<unsigned char>(lower[pos - 1])))
            return pos + needle.size();
        pos += needle.size();
    }
    return std::nullopt;
}

// Reads a yes/no value after any of the label spellings. Returns nullopt when
// no label is present or the value is not recognizably yes/no.
std::optional<bool> read_flag(const std::string& text, const std::vector<std::string>& labels) {
    for (const auto& label : labels) {
        auto pos = find_label(text, label);
        if (!pos) continue;
        std::size_t i = *pos;
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        std::string word;
        while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i])))
            word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i++]))));
        bool slash_follows = i < text.size() && text[i] == '/';
        if (word == "yes" && slash_follows) continue;  // literal "yes/no" template echo
        if (word == "yes") return true;
        if (word == "no") return false;
    }
    return std::nullopt;
}

}  // namespace

LLMRequest render_sufficiency_prompt(const std::string& question,
                                     const std::vector<std::string>& facts, bool temporal) {
    std::string user = "Question: " + question +
                       "\n\n"
                       "Retrieved Facts:\n" +
                       render_fact_lines(facts) + "\n";
    if (temporal) user += kTemporalBlock + "\n";
    user += kEvaluateBlock;
    return LLMRequest{kSufficiencySystem, std::move(user), 0.3, ""};
}

SufficiencyResult parse_sufficiency_response(const std::string& text) {
    SufficiencyResult result;
    auto exact = read_flag(text, {"EXACT", "EXACT_MATCH"});
    auto inferrable = read_flag(text, {"INFERRABLE"});
    auto partial = read_flag(text, {"PARTIAL", "PARTIAL_MATCH"});

    if (!exact && !inferrable && !partial) {
        result.tier = Tier::Partial;
        result.confidence = 0.0;
        result.missing = "parse failure";
        result.parse_failed = true;
        return result;
    }

    if (exact.value_or(false))
        result.tier = Tier::Exact;
    else if (inferrable.value_or(false))
        result.tier = Tier::Inferrable;
    else if (partial.value_or(false))
        result.tier = Tier::Partial;
    else
        result.tier = Tier::None;

    static const std::regex conf_re(R"(CONFIDENCE\s*:\s*([0-9]*\.?[0-9]+))", std::regex::icase);
    std::smatch m;
    if (std::regex_search(text, m, conf_re)) {
        double c = std::strtod(m[1].str().c_str(), nullptr);
        result.confidence = std::clamp(c, 0.0, 1.0);
    }

    static const std::regex missing_re(R"(MISSING\s*:\s*([^\n\r]*))", std::regex::icase);
    if (std::regex_search(text, m, missing_re)) {
        std::string missing = trim(m[1].str());
        if (to_lower(missing) != "none") result.missing = missing;
    }
    return result;
}

std::string format_sufficiency_response(Tier tier, double confidence,
                                        const std::string& missing) {
    auto yn = [](bool v) { return v ? "yes" : "no"; };
    std::string out;
    out += std::string("EXACT: ") + yn(tier == Tier::Exact) + "\n";
    out += std::string("INFERRABLE: ") + yn(tier == Tier::Inferrable) + "\n";
    out += std::string("PARTIAL: ") + yn(tier == Tier::Partial) + "\n";
    out += "CONFIDENCE: " + format_confidence(confidence) + "\n";
    out += "MISSING: " + (missing.empty() ? std::string("none") : missing);
    return out;
}

LLMRequest render_refinement_prompt(const std::string& original, const std::string& current,
                                    const std::string& missing, int iteration, int max_iterations,
                                    const std::string& strategy, const std::string& entity_hint) {
    std::string user;
    user += "Original question: " + original + "\n";
    user += "Current search query: " + current + "\n";
    user += "Missing information: " + missing + "\n";
    user += "Iteration: " + std::to_string(iteration) + "/" + std::to_string(max_iterations) +
            "\n\n";
    user += "Strategy: " + strategy + "\n";
    if (!entity_hint.empty()) user += "Entity context: " + entity_hint + "\n";
    user += "\n";
    user +=
        "Generate an improved search query to find the missing information.\n"
        "Keep it concise and focused. Return ONLY the query (no explanation).";
    return LLMRequest{kRefinementSystem, std::move(user), 0.3, ""};
}

const std::string& answer_instruction(Tier tier, double confidence, bool temporal) {
    if (temporal && tier == Tier::Exact) return kInstrTemporalExact;
    if (temporal && tier == Tier::Inferrable) return kInstrTemporalInferrable;
    if (!temporal && (tier == Tier::Exact || (tier == Tier::Inferrable && confidence >= 0.75)))
        return kInstrConfident;
    if ((tier == Tier::Inferrable || tier == Tier::Partial) && confidence >= 0.50)
        return kInstrReasoned;
    return kInstrLowConfidence;
}

LLMRequest render_answer_prompt(const std::string& question,
                                const std::vector<std::string>& facts, Tier tier,
                                double confidence, bool temporal,
                                const std::vector<std::string>& reasoning_steps) {
    std::string user = answer_instruction(tier, confidence, temporal) + "\n";
    if (!reasoning_steps.empty()) {
        user += "Reasoning steps:\n";
        for (std::size_t i = 0; i < reasoning_steps.size(); ++i)
            user += std::to_string(i + 1) + ". " + reasoning_steps[i] + "\n";
    }
    user += "\nQuestion: " + question +
            "\n\n"
            "Relevant Facts:\n" +
            render_fact_lines(facts) +
            "\n"
            "Answer (be concise and direct):";
    return LLMRequest{kAnswerSystem, std::move(user), 0.3, ""};
}

LLMRequest render_judge_prompt(const std::string& question, const std::string& truth,
                               const std::string& prediction) {
    std::string user;
    user +=
        "You are an impartial judge evaluating if an AI assistant's\n"
        "answer is correct.\n\n";
    user += "**Question**: " + question + "\n";
    user += "**Ground Truth**: " + truth + "\n";
    user += "**Prediction**: " + prediction + "\n\n";
    user +=
        "**Evaluation Criteria**:\n"
        "1. The prediction must convey the same core information\n"
        "   as the ground truth.\n"
        "2. Different wording is acceptable if the meaning is\n"
        "   preserved.\n"
        "3. For dates: \"May 7, 2023\" and \"7 May 2023\" are\n"
        "   equivalent.\n"
        "4. If prediction says \"I don't know\" but ground truth\n"
        "   exists, it is WRONG.\n"
        "5. Partial answers that miss the key point are WRONG.\n\n"
        "**Output Format**:\n"
        "Return ONLY a JSON object:\n"
        "{\"score\": 1 or 0, \"reason\": \"Brief explanation\"}";
    return LLMRequest{"", std::move(user), 0.3, ""};
}

std::optional<JudgeVerdict> parse_judge_response(const std::string& text) {
    auto try_parse = [](const std::string& s) -> std::optional<JudgeVerdict> {
        auto json = nlohmann::json::parse(s, nullptr, false);
        if (json.is_discarded() || !json.is_object() || !json.contains("score"))
            return std::nullopt;
        const auto& score = json["score"];
        int value;
        if (score.is_number_integer())
            value = score.get<int>();
        else if (score.is_string() && (score == "0" || score == "1"))
            value = score == "1" ? 1 : 0;
        else
            return std::nullopt;
        if (value != 0 && value != 1) return std::nullopt;
        JudgeVerdict v;
        v.score = value;
        if (json.contains("reason") && json["reason"].is_string())
            v.reason = json["reason"].get<std::string>();
        return v;
    };
    if (auto v = try_parse(text)) return v;
    // Models often wrap the object in prose or code fences; retry on the
    // outermost brace span.
    auto open = text.find('{');
    auto close = text.rfind('}');
    if (open != std::string::npos && close != std::string::npos && close > open)
        return try_parse(text.substr(open, close - open + 1));
    return std::nullopt;
}

LLMRequest render_reasoning_prompt(const std::string& question,
                                   const std::vector<std::string>& entities,
                                   const std::vector<std::string>& facts) {
    std::string user = "Analyze if multi-hop reasoning is needed.\n";
    user += "Question: " + question + "\n";
    user += "Entities: " + join(entities, ", ") + "\n";
    user += "Facts:\n" + render_fact_lines(facts) + "\n";
    user +=
        "If connecting multiple facts is required, respond with TYPE: MULTI-HOP followed by\n"
        "numbered inference steps (Step 1: ..., Step 2: ...). Otherwise respond with\n"
        "TYPE: DIRECT.";
    return LLMRequest{"", std::move(user), 0.3, ""};
}

ParsedChain parse_reasoning_response(const std::string& text) {
    ParsedChain chain;
    static const std::regex type_re(R"(TYPE\s*:\s*MULTI[-_ ]?HOP)", std::regex::icase);
    chain.multi_hop = std::regex_search(text, type_re);
    if (!chain.multi_hop) return chain;
    static const std::regex step_re(R"(Step\s*[0-9]+\s*:\s*([^\n\r]*))", std::regex::icase);
    auto begin = std::sregex_iterator(text.begin(), text.end(), step_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        std::string step = trim((*it)[1].str());
        if (!step.empty()) chain.steps.push_back(std::move(step));
    }
    if (chain.steps.size() < 2) {  // a one-step "chain" is just a direct answer
        chain.multi_hop = false;
        chain.steps.clear();
    }
    return chain;
}

LLMRequest render_extraction_prompt(const std::string& speaker, const std::string& timestamp,
                                    const std::string& text) {
    std::string user;
    user += "Extract atomic facts from this dialogue turn as \"subject | predicate | object";
    user += " | time\" lines.\n\n";
    user += "Speaker: " + speaker + "\n";
    user += "Session date: " + timestamp + "\n";
    user += "Turn:\n" + text + "\n\n";
    user +=
        "Rules:\n"
        "- One fact per line; separate fields with \" | \".\n"
        "- Ground subjective statements in the speaker (\"X is great\" -> \"" +
        speaker +
        " | thinks | X is great\").\n"
        "- The time field is optional; include it only when the turn says when the event "
        "happened.\n"
        "- Output fact lines only, nothing else.";
    return LLMRequest{"", std::move(user), 0.3, ""};
}

std::vector<ExtractedFact> parse_extraction_response(const std::string& text) {
    std::vector<ExtractedFact> facts;
    for (const auto& raw_line : split_lines(text)) {
        std::string line = trim(raw_line);
        if (line.empty()) continue;
        if (line.rfind("- ", 0) == 0) line = trim(line.substr(2));
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t bar = line.find('|', start);
            if (bar == std::string::npos) {
                fields.push_back(trim(line.substr(start)));
                break;
            }
            fields.push_back(trim(line.substr(start, bar - start)));
            start = bar + 1;
        }
        if (fields.size() < 3 || fields.size() > 4) continue;
        if (fields[0].empty() || fields[1].empty() || fields[2].empty()) continue;
        ExtractedFact f;
        f.subject = fields[0];
        f.predicate = fields[1];
        f.object = fields[2];
        if (fields.size() == 4) f.time_expr = fields[3];
        facts.push_back(std::move(f));
    }
    return facts;
}

LLMRequest render_entity_prompt(const std::string& question) {
    std::string user;
    user += "List the proper-name entities (people, places, organizations) in this question.\n";
    user += "Question: " + question + "\n";
    user += "Respond with a comma-separated list of names, or \"none\".";
    return LLMRequest{"", std::move(user), 0.3, ""};
}

std::vector<std::string> parse_entity_response(const std::string& text) {
    std::vector<std::string> names;
    std::string cur;
    auto flush = [&]() {
        std::string name = trim(cur);
        cur.clear();
        if (name.empty() || to_lower(name) == "none") return;
        names.push_back(std::move(name));
    };
    for (char c : text) {
        if (c == ',' || c == '\n' || c == ';') {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return names;
}

LLMRequest render_inference_check_prompt(const std::string& question,
                                         const std::string& gold_answer,
                                         const std::vector<std::string>& facts) {
    std::string user;
    user += "Question: " + question + "\n";
    user += "Gold answer: " + gold_answer + "\n";
    user += "Retrieved facts:\n" + render_fact_lines(facts) + "\n";
    user += "Can the gold answer still be inferred from these facts alone? Respond YES or NO.";
    return LLMRequest{"", std::move(user), 0.3, ""};
}

std::optional<bool> parse_yes_no(const std::string& text) {
    for (const auto& tok : tokenize(text)) {
        if (tok == "yes") return true;
        if (tok == "no") return false;
    }
    return std::nullopt;
}

}  // namespace recall::prompts
