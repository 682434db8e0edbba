#include "recall/mock_provider.hpp"

#include <algorithm>
#include <set>

#include "recall/dates.hpp"
#include "recall/iris.hpp"
#include "recall/judge.hpp"
#include "recall/text.hpp"

namespace recall {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "a",    "an",   "and",  "are",  "at",   "be",    "both", "by",   "did",  "do",
        "does", "for",  "from", "his",  "her",  "how",   "in",   "is",   "it",   "its",
        "like", "of",   "on",   "or",   "s",    "the",   "their", "to",  "was",  "were",
        "what", "when", "where", "which", "who", "why",  "with"};
    return words;
}

std::string first_line_after(const std::string& text, const std::string& label) {
    for (const auto& line : split_lines(text)) {
        if (line.rfind(label, 0) == 0) return trim(line.substr(label.size()));
    }
    return "";
}

std::vector<std::string> fact_lines(const std::string& text) {
    std::vector<std::string> facts;
    for (const auto& line : split_lines(text))
        if (line.rfind("- ", 0) == 0) facts.push_back(line.substr(2));
    return facts;
}

std::vector<std::string> content_tokens(const std::string& text) {
    std::vector<std::string> out;
    for (auto& tok : tokenize(text))
        if (!stopwords().count(tok)) out.push_back(std::move(tok));
    return out;
}

// Splits a turn into rough sentences on terminal punctuation.
std::vector<std::string> sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?' || c == ';' || c == '\n') {
            std::string s = trim(cur);
            if (!s.empty()) out.push_back(std::move(s));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    std::string s = trim(cur);
    if (!s.empty()) out.push_back(std::move(s));
    return out;
}

const std::vector<std::string>& relative_time_phrases() {
    static const std::vector<std::string> phrases = {
        "yesterday", "today",  "tomorrow",  "last week", "next week",
        "last month", "next month", "last year", "next year", "last night"};
    return phrases;
}

}  // namespace

LLMResponse MockProvider::chat(const LLMRequest& request, CallRole role) {
    validate(request);
    std::string text;
    switch (role) {
        case CallRole::Extract:
            text = request.user.rfind("Extract atomic facts", 0) == 0 ? extract(request.user)
                                                                      : entities(request.user);
            break;
        case CallRole::Sufficiency: text = sufficiency(request.user); break;
        case CallRole::Refine: text = refine(request.user); break;
        case CallRole::Reason: text = "TYPE: DIRECT"; break;
        case CallRole::Answer: text = answer(request.user); break;
        case CallRole::Judge: text = judge(request.user); break;
    }
    return LLMResponse{std::move(text), std::chrono::microseconds{0}, role};
}

std::string MockProvider::extract(const std::string& user) const {
    std::string speaker = first_line_after(user, "Speaker: ");
    if (speaker.empty()) speaker = "speaker";

    // The turn body sits between "Turn:" and the trailing "Rules:" block.
    std::string body;
    bool in_turn = false;
    for (const auto& line : split_lines(user)) {
        if (line == "Turn:") {
            in_turn = true;
            continue;
        }
        if (in_turn && line.rfind("Rules:", 0) == 0) break;
        if (in_turn) body += line + "\n";
    }

    std::string out;
    for (const auto& sentence : sentences(body)) {
        if (tokenize(sentence).empty()) continue;
        std::string time;
        auto toks = tokenize(sentence);
        for (const auto& phrase : relative_time_phrases()) {
            if (contains_token_seq(toks, tokenize(phrase))) {
                time = phrase;
                break;
            }
        }
        if (time.empty()) {
            if (auto d = parse_date_like(sentence); d && d->precision != DatePrecision::Year)
                time = d->to_iso();
        }
        out += speaker + " | says | " + sentence;
        if (!time.empty()) out += " | " + time;
        out += "\n";
    }
    return out;
}

std::string MockProvider::entities(const std::string& user) const {
    std::string question = first_line_after(user, "Question: ");
    auto names = extract_entities_rule_based(question);
    return names.empty() ? "none" : join(names, ", ");
}

std::string MockProvider::sufficiency(const std::string& user) const {
    std::string question = first_line_after(user, "Question: ");
    auto facts = fact_lines(user);
    bool temporal = user.find("This is a TEMPORAL question") != std::string::npos;

    auto want = content_tokens(question);
    std::set<std::string> have;
    double best = 0.0;
    bool any_dated = false;
    for (const auto& f : facts) {
        auto toks = tokenize(f);
        if (f.find("(time:") != std::string::npos) any_dated = true;
        std::size_t overlap = 0;
        for (const auto& w : want)
            if (std::find(toks.begin(), toks.end(), w) != toks.end()) {
                have.insert(w);
                ++overlap;
            }
        if (!want.empty()) best = std::max(best, double(overlap) / double(want.size()));
    }
    double coverage = want.empty() ? 1.0 : double(have.size()) / double(want.size());

    std::vector<std::string> missing;
    for (const auto& w : want)
        if (!have.count(w)) missing.push_back(w);
    std::string missing_text =
        missing.empty() ? std::string("none") : "facts about " + join(missing, ", ");

    auto respond = [](const char* exact, const char* inf, const char* part, double conf,
                      const std::string& miss) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", conf);
        return std::string("EXACT: ") + exact + "\nINFERRABLE: " + inf + "\nPARTIAL: " + part +
               "\nCONFIDENCE: " + buf + "\nMISSING: " + miss;
    };

    if (facts.empty()) return respond("no", "no", "no", 0.05, "no relevant facts retrieved");
    if (best >= 0.999 && (!temporal || any_dated)) return respond("yes", "no", "no", 0.9, "none");
    if (coverage >= 0.65 && (!temporal || any_dated))
        return respond("no", "yes", "no", 0.75, missing_text);
    if (coverage >= 0.25) return respond("no", "no", "yes", 0.4, missing_text);
    return respond("no", "no", "no", 0.1, missing_text);
}

std::string MockProvider::refine(const std::string& user) const {
    std::string question = first_line_after(user, "Original question: ");
    std::string missing = first_line_after(user, "Missing information: ");
    std::string hint = first_line_after(user, "Entity context: ");

    std::vector<std::string> parts = content_tokens(question);
    for (const auto& tok : content_tokens(missing)) {
        if (tok == "none" || tok == "facts" || tok == "about") continue;
        if (std::find(parts.begin(), parts.end(), tok) == parts.end()) parts.push_back(tok);
    }
    for (const auto& tok : content_tokens(hint)) {
        if (tok == "need" || tok == "more" || tok == "about" || tok == "only" ||
            tok == "fact" || tok == "facts" || tok == "include" || tok == "entity" ||
            tok == "names" || tok == "query")
            continue;
        if (std::find(parts.begin(), parts.end(), tok) == parts.end()) parts.push_back(tok);
    }
    return parts.empty() ? question : join(parts, " ");
}

std::string MockProvider::answer(const std::string& user) const {
    std::string question = first_line_after(user, "Question: ");
    auto facts = fact_lines(user);
    if (facts.empty()) return "Not mentioned in the conversation.";

    auto want = content_tokens(question);
    std::size_t best_idx = 0, best_overlap = 0;
    for (std::size_t i = 0; i < facts.size(); ++i) {
        auto toks = tokenize(facts[i]);
        std::size_t overlap = 0;
        for (const auto& w : want)
            if (std::find(toks.begin(), toks.end(), w) != toks.end()) ++overlap;
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best_idx = i;
        }
    }
    std::string best = facts[best_idx];
    // Strip the grounding suffix "[...]" appended by the answer prompt.
    auto bracket = best.rfind(" [");
    if (bracket != std::string::npos && best.back() == ']') best = best.substr(0, bracket);
    return best;
}

std::string MockProvider::judge(const std::string& user) const {
    std::string question = first_line_after(user, "**Question**: ");
    std::string truth = first_line_after(user, "**Ground Truth**: ");
    std::string prediction = first_line_after(user, "**Prediction**: ");
    bool ok = eval::RuleJudge::matches(truth, prediction);
    return std::string("{\"score\": ") + (ok ? "1" : "0") +
           ", \"reason\": \"deterministic token/date match\"}";
}

}  // namespace recall
