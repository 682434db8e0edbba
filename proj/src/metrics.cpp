#include "recall/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "recall/text.hpp"

namespace recall::eval {

double token_f1(const std::string& prediction, const std::string& gold) {
    auto p = tokenize(prediction);
    auto g = tokenize(gold);
    if (p.empty() && g.empty()) return 1.0;
    if (p.empty() || g.empty()) return 0.0;

    std::map<std::string, int> gold_counts;
    for (const auto& t : g) ++gold_counts[t];
    int common = 0;
    for (const auto& t : p) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    double precision = double(common) / double(p.size());
    double recall = double(common) / double(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

double rouge_l(const std::string& prediction, const std::string& gold) {
    auto p = tokenize(prediction);
    auto g = tokenize(gold);
    if (p.empty() && g.empty()) return 1.0;
    if (p.empty() || g.empty()) return 0.0;

    // Classic LCS dynamic program, rolling rows.
    std::vector<std::size_t> prev(g.size() + 1, 0), cur(g.size() + 1, 0);
    for (std::size_t i = 1; i <= p.size(); ++i) {
        for (std::size_t j = 1; j <= g.size(); ++j) {
            if (p[i - 1] == g[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    std::size_t lcs = prev[g.size()];
    if (lcs == 0) return 0.0;
    double precision = double(lcs) / double(p.size());
    double recall = double(lcs) / double(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::optional<double> recall_at_k(const std::vector<std::string>& ranked_turns,
                                  const std::set<std::string>& gold_turns, std::size_t k) {
    if (gold_turns.empty()) return std::nullopt;
    std::set<std::string> seen;
    std::size_t hits = 0, rank = 0;
    for (const auto& turn : ranked_turns) {
        if (!seen.insert(turn).second) continue;
        if (++rank > k) break;
        if (gold_turns.count(turn)) ++hits;
    }
    return double(hits) / double(gold_turns.size());
}

std::optional<double> ndcg_at_k(const std::vector<std::string>& ranked_turns,
                                const std::set<std::string>& gold_turns, std::size_t k) {
    if (gold_turns.empty()) return std::nullopt;
    std::set<std::string> seen;
    double dcg = 0.0;
    std::size_t rank = 0;
    for (const auto& turn : ranked_turns) {
        if (!seen.insert(turn).second) continue;
        if (++rank > k) break;
        if (gold_turns.count(turn)) dcg += 1.0 / std::log2(double(rank) + 1.0);
    }
    double idcg = 0.0;
    std::size_t ideal = std::min(k, gold_turns.size());
    for (std::size_t r = 1; r <= ideal; ++r) idcg += 1.0 / std::log2(double(r) + 1.0);
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

namespace {

// Tie-averaged ranks (1-based).
std::vector<double> average_ranks(const std::vector<double>& values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double avg = (double(i + 1) + double(j + 1)) / 2.0;
        for (std::size_t idx = i; idx <= j; ++idx) ranks[order[idx]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) return std::nullopt;
    auto distinct = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] != v[0]) return true;
        return false;
    };
    if (!distinct(xs) || !distinct(ys)) return std::nullopt;

    auto rx = average_ranks(xs);
    auto ry = average_ranks(ys);
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / double(rx.size());
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / double(ry.size());
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        double dx = rx[i] - mx, dy = ry[i] - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if (vx == 0.0 || vy == 0.0) return std::nullopt;
    return cov / std::sqrt(vx * vy);
}

std::optional<double> pr_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size() || scores.empty()) return std::nullopt;
    std::size_t positives = std::size_t(std::count(labels.begin(), labels.end(), true));
    if (positives == 0) return std::nullopt;

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Step integral over the descending-threshold sweep; tied scores enter
    // together so the curve is threshold-consistent.
    double auc = 0.0;
    double prev_recall = 0.0;
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (std::size_t idx = i; idx <= j; ++idx) {
            if (labels[order[idx]])
                ++tp;
            else
                ++fp;
        }
        double precision = double(tp) / double(tp + fp);
        double recall = double(tp) / double(positives);
        auc += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    return auc;
}

}  // namespace recall::eval
