#pragma once
// Answer and retrieval metrics plus the rank/PR statistics used to validate
// the sufficiency classifier. Metrics that are undefined for an input
// (empty gold sets, constant series) return nullopt and are counted, never
// silently zeroed.

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace recall::eval {

// Bag-overlap F1 over lowercased, punctuation-stripped tokens.
// Both empty -> 1, exactly one empty -> 0.
double token_f1(const std::string& prediction, const std::string& gold);

// LCS-based F-measure (beta = 1) over normalized token sequences.
double rouge_l(const std::string& prediction, const std::string& gold);

// |top-k ranked turns intersected with gold| / |gold|; nullopt when gold is
// empty.
std::optional<double> recall_at_k(const std::vector<std::string>& ranked_turns,
                                  const std::set<std::string>& gold_turns, std::size_t k);

// Binary-relevance nDCG with log2(rank+1) discount, ideal DCG over
// min(k, |gold|); nullopt when gold is empty.
std::optional<double> ndcg_at_k(const std::vector<std::string>& ranked_turns,
                                const std::set<std::string>& gold_turns, std::size_t k);

// Spearman rank correlation with tie-averaged ranks; nullopt when either
// series has no rank variance (fewer than 2 distinct values).
std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Precision-recall step integral with `scores` as the ranking signal and
// `labels` as binary relevance; nullopt when there are no positives.
std::optional<double> pr_auc(const std::vector<double>& scores, const std::vector<bool>& labels);

}  // namespace recall::eval
