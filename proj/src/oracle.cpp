#include "recall/oracle.hpp"

#include <algorithm>

#include "recall/metrics.hpp"
#include "recall/prompts.hpp"

namespace recall::eval {

const char* oracle_label_name(OracleLabel l) {
    switch (l) {
        case OracleLabel::Exact: return "EXACT";
        case OracleLabel::Inferrable: return "INFERRABLE";
        case OracleLabel::PartialOrNone: return "PARTIAL_OR_NONE";
    }
    return "?";
}

std::optional<bool> CoverageRatioChecker::can_infer(const QARecord& record,
                                                    const std::set<std::string>& retrieved_turns,
                                                    const std::vector<std::string>&) {
    if (record.evidence.empty()) return false;
    std::size_t covered = 0;
    for (const auto& id : record.evidence)
        if (retrieved_turns.count(id)) ++covered;
    return double(covered) / double(record.evidence.size()) >= ratio_;
}

std::optional<bool> LLMChecker::can_infer(const QARecord& record, const std::set<std::string>&,
                                          const std::vector<std::string>& fact_texts) {
    try {
        auto resp = llm_.chat(
            prompts::render_inference_check_prompt(record.question, record.gold_answer,
                                                   fact_texts),
            CallRole::Judge);
        return prompts::parse_yes_no(resp.text);
    } catch (const ProviderError&) {
        return std::nullopt;
    }
}

OracleOutcome oracle_label(const std::set<std::string>& retrieved_turns, const QARecord& record,
                           InferenceChecker* checker,
                           const std::vector<std::string>& fact_texts) {
    OracleOutcome out;
    bool covered = std::all_of(record.evidence.begin(), record.evidence.end(),
                               [&](const std::string& id) { return retrieved_turns.count(id); });
    if (covered) {
        out.label = OracleLabel::Exact;
        return out;
    }
    if (checker) {
        auto verdict = checker->can_infer(record, retrieved_turns, fact_texts);
        if (!verdict) {
            out.checker_failed = true;
        } else if (*verdict) {
            out.label = OracleLabel::Inferrable;
        }
    }
    return out;
}

ValidationStats validate_classifier(const std::vector<ValidationRow>& rows,
                                    double theta_general, double theta_temporal) {
    ValidationStats stats;
    stats.rows = rows.size();
    if (rows.empty()) return stats;

    auto classifier_sufficient = [](const ValidationRow& r) {
        return r.tier == Tier::Exact || r.tier == Tier::Inferrable;
    };
    auto oracle_sufficient = [](const ValidationRow& r) {
        return r.oracle == OracleLabel::Exact || r.oracle == OracleLabel::Inferrable;
    };
    auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return double(num) / double(den);
    };

    std::size_t agree = 0, claims = 0, claims_ok = 0, oracle_pos = 0, recalled = 0;
    std::size_t exact_claims = 0, exact_ok = 0;
    std::size_t at_temporal = 0, at_temporal_ok = 0, at_general = 0, at_general_ok = 0;
    std::vector<double> confidences, ordinals;
    std::vector<bool> labels;

    for (const auto& r : rows) {
        bool cs = classifier_sufficient(r);
        bool os = oracle_sufficient(r);
        if (cs == os) ++agree;
        if (cs) {
            ++claims;
            if (os) ++claims_ok;
        }
        if (os) {
            ++oracle_pos;
            if (cs) ++recalled;
        }
        if (r.tier == Tier::Exact) {
            ++exact_claims;
            if (r.oracle == OracleLabel::Exact) ++exact_ok;
        }
        if (cs && r.confidence >= theta_temporal) {
            ++at_temporal;
            if (os) ++at_temporal_ok;
        }
        if (cs && r.confidence >= theta_general) {
            ++at_general;
            if (os) ++at_general_ok;
        }
        confidences.push_back(r.confidence);
        double ordinal = r.oracle == OracleLabel::Exact        ? 2.0
                         : r.oracle == OracleLabel::Inferrable ? 1.0
                                                               : 0.0;
        ordinals.push_back(ordinal);
        labels.push_back(os);
    }

    stats.binary_agreement = double(agree) / double(rows.size());
    stats.sufficiency_precision = ratio(claims_ok, claims);
    stats.sufficiency_recall = ratio(recalled, oracle_pos);
    stats.exact_precision = ratio(exact_ok, exact_claims);
    stats.precision_at_temporal = ratio(at_temporal_ok, at_temporal);
    stats.precision_at_general = ratio(at_general_ok, at_general);
    stats.spearman_rho = spearman(confidences, ordinals);
    stats.pr_auc = pr_auc(confidences, labels);
    return stats;
}

}  // namespace recall::eval
