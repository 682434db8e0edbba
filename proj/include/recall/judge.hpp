#pragma once
// Answer-correctness judges. The rule judge keeps offline runs fully
// deterministic; the LLM judge wraps any chat provider.

#include <optional>
#include <string>

#include "recall/providers.hpp"

namespace recall::eval {

struct JudgeOutcome {
    std::optional<int> score;  // 1 correct, 0 wrong, nullopt indeterminate
    std::string reason;
};

class Judge {
public:
    virtual ~Judge() = default;
    virtual JudgeOutcome judge(const std::string& question, const std::string& truth,
                               const std::string& prediction) = 0;
};

// Deterministic matcher: normalized string equality, gold-token containment,
// or calendar-date equivalence ("May 7, 2023" == "7 May 2023").
class RuleJudge final : public Judge {
public:
    JudgeOutcome judge(const std::string& question, const std::string& truth,
                       const std::string& prediction) override;

    static bool matches(const std::string& truth, const std::string& prediction);
};

// Renders the judge prompt, parses the {"score", "reason"} object, retries
// once on malformed output, then reports indeterminate.
class LLMJudge final : public Judge {
public:
    explicit LLMJudge(LLMProvider& llm) : llm_(llm) {}
    JudgeOutcome judge(const std::string& question, const std::string& truth,
                       const std::string& prediction) override;

private:
    LLMProvider& llm_;
};

}  // namespace recall::eval
