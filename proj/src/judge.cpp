#include "recall/judge.hpp"

#include <algorithm>

#include "recall/dates.hpp"
#include "recall/prompts.hpp"
#include "recall/text.hpp"

namespace recall::eval {

bool RuleJudge::matches(const std::string& truth, const std::string& prediction) {
    std::string nt = normalize_text(truth);
    std::string np = normalize_text(prediction);
    if (nt.empty() || np.empty()) return nt == np;
    if (nt == np) return true;

    // Date equivalence across formats, at the coarser stated precision.
    auto dt = parse_date_like(truth);
    auto dp = parse_date_like(prediction);
    if (dt && dp) {
        auto coarser = std::min(dt->precision, dp->precision);
        bool same = dt->year == dp->year;
        if (same && coarser >= DatePrecision::Month) same = dt->month == dp->month;
        if (same && coarser >= DatePrecision::Day) same = dt->day == dp->day;
        if (same) return true;
    }

    // The prediction carries every gold token (gold is usually terse).
    auto gold_tokens = tokenize(truth);
    auto pred_tokens = tokenize(prediction);
    return contains_all(pred_tokens, gold_tokens);
}

JudgeOutcome RuleJudge::judge(const std::string&, const std::string& truth,
                              const std::string& prediction) {
    JudgeOutcome out;
    bool ok = matches(truth, prediction);
    out.score = ok ? 1 : 0;
    out.reason = ok ? "matches ground truth" : "differs from ground truth";
    return out;
}

JudgeOutcome LLMJudge::judge(const std::string& question, const std::string& truth,
                             const std::string& prediction) {
    auto req = prompts::render_judge_prompt(question, truth, prediction);
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            auto resp = llm_.chat(req, CallRole::Judge);
            if (auto verdict = prompts::parse_judge_response(resp.text))
                return JudgeOutcome{verdict->score, verdict->reason};
        } catch (const ProviderError&) {
            // fall through to retry / indeterminate
        }
    }
    return JudgeOutcome{std::nullopt, "judge output unusable after retry"};
}

}  // namespace recall::eval
