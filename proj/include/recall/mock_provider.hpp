#pragma once
// Deterministic rule-based chat provider for offline runs. Every role gets a
// plausible, reproducible response derived from the request text alone, so
// ingestion, the retrieval loop, and judging all work end-to-end with no
// network access and byte-stable outputs.

#include <string>

#include "recall/providers.hpp"

namespace recall {

class MockProvider final : public LLMProvider {
public:
    LLMResponse chat(const LLMRequest& request, CallRole role) override;

private:
    std::string extract(const std::string& user) const;
    std::string entities(const std::string& user) const;
    std::string sufficiency(const std::string& user) const;
    std::string refine(const std::string& user) const;
    std::string answer(const std::string& user) const;
    std::string judge(const std::string& user) const;
};

}  // namespace recall
