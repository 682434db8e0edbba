#pragma once
// Coverage-based sufficiency oracle and the classifier-validation statistics
// computed against it.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "recall/locomo.hpp"
#include "recall/providers.hpp"
#include "recall/types.hpp"

namespace recall::eval {

enum class OracleLabel { Exact, Inferrable, PartialOrNone };

const char* oracle_label_name(OracleLabel l);

// Decides whether the gold answer is still inferable from partially-covering
// retrieval. Pluggable: an LLM in live mode, a scripted table or coverage
// rule offline.
class InferenceChecker {
public:
    virtual ~InferenceChecker() = default;
    // nullopt == checker failure.
    virtual std::optional<bool> can_infer(const QARecord& record,
                                          const std::set<std::string>& retrieved_turns,
                                          const std::vector<std::string>& fact_texts) = 0;
};

// Fixed verdict per question string; unknown questions fail the check.
class ScriptedChecker final : public InferenceChecker {
public:
    explicit ScriptedChecker(std::map<std::string, bool> table) : table_(std::move(table)) {}
    std::optional<bool> can_infer(const QARecord& record, const std::set<std::string>&,
                                  const std::vector<std::string>&) override {
        auto it = table_.find(record.question);
        if (it == table_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<std::string, bool> table_;
};

// Offline default: inferable when at least `ratio` of the gold evidence
// turns are covered. A deterministic stand-in for the LLM judgment.
class CoverageRatioChecker final : public InferenceChecker {
public:
    explicit CoverageRatioChecker(double ratio = 0.5) : ratio_(ratio) {}
    std::optional<bool> can_infer(const QARecord& record,
                                  const std::set<std::string>& retrieved_turns,
                                  const std::vector<std::string>&) override;

private:
    double ratio_;
};

// Provider-backed checker using the inference-check prompt.
class LLMChecker final : public InferenceChecker {
public:
    explicit LLMChecker(LLMProvider& llm) : llm_(llm) {}
    std::optional<bool> can_infer(const QARecord& record, const std::set<std::string>&,
                                  const std::vector<std::string>& fact_texts) override;

private:
    LLMProvider& llm_;
};

struct OracleOutcome {
    OracleLabel label = OracleLabel::PartialOrNone;
    bool checker_failed = false;
};

// EXACT iff every annotated evidence turn is covered by the retrieved set
// (vacuously true for records with no evidence); otherwise INFERRABLE when
// the checker affirms; otherwise PARTIAL_OR_NONE. Checker failure maps to
// PARTIAL_OR_NONE with the flag set.
OracleOutcome oracle_label(const std::set<std::string>& retrieved_turns, const QARecord& record,
                           InferenceChecker* checker,
                           const std::vector<std::string>& fact_texts = {});

// One evaluated iteration: the classifier's calibrated verdict plus the
// oracle's label for the same retrieval state.
struct ValidationRow {
    Tier tier = Tier::Partial;
    double confidence = 0.0;
    OracleLabel oracle = OracleLabel::PartialOrNone;
};

struct ValidationStats {
    std::size_t rows = 0;
    std::size_t skipped = 0;
    double binary_agreement = 0.0;
    std::optional<double> sufficiency_precision;
    std::optional<double> sufficiency_recall;
    std::optional<double> exact_precision;
    std::optional<double> precision_at_temporal;  // commitments with conf >= theta_temporal
    std::optional<double> precision_at_general;   // commitments with conf >= theta_general
    std::optional<double> spearman_rho;
    std::optional<double> pr_auc;
};

// Collapses tiers to sufficient/insufficient for agreement and P/R, scores
// threshold commitments, and correlates confidence with the oracle ordinal
// (EXACT=2, INFERRABLE=1, PARTIAL_OR_NONE=0).
ValidationStats validate_classifier(const std::vector<ValidationRow>& rows,
                                    double theta_general = 0.70, double theta_temporal = 0.85);

}  // namespace recall::eval
