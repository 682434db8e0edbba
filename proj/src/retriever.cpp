#include "recall/retriever.hpp"

#include <algorithm>
#include <unordered_map>

#include "recall/text.hpp"

namespace recall {

EvidenceItem TupleRetriever::to_evidence(const IndexTuple& tuple, double score) {
    EvidenceItem item;
    item.id = "t" + std::to_string(tuple.id);
    item.text = tuple.text();
    item.source_turn = tuple.source_turn;
    item.entity_scope = tuple.subject + " " + tuple.object;
    item.score = score;
    return item;
}

TupleRetriever::TupleRetriever(const MemoryStore& store, EmbeddingProvider& embedder,
                               bool expand_edges)
    : store_(store), embedder_(embedder), expand_edges_(expand_edges) {}

std::vector<EvidenceItem> TupleRetriever::retrieve(const std::string& query, std::size_t k) {
    auto hits = store_.retrieve(embedder_.embed(query), k);
    std::vector<EvidenceItem> out;
    out.reserve(hits.size());
    for (const auto& hit : hits) out.push_back(to_evidence(store_.tuple(hit.id), hit.score));
    return out;
}

std::vector<EvidenceItem> TupleRetriever::expand(const std::vector<EvidenceItem>& seeds) {
    if (!expand_edges_ || seeds.empty()) return {};
    ++expansions_;
    std::vector<TupleId> ids;
    ids.reserve(seeds.size());
    for (const auto& s : seeds) {
        if (!s.id.empty() && s.id[0] == 't')
            ids.push_back(std::stoull(s.id.substr(1)));
    }
    std::vector<EvidenceItem> out;
    for (TupleId id : store_.graph_expand(ids)) out.push_back(to_evidence(store_.tuple(id), 0.0));
    return out;
}

RawTurnRetriever::RawTurnRetriever(const MemoryStore& store, double k1, double b)
    : store_(store), k1_(k1), b_(b) {
    std::size_t total = 0;
    for (const auto& turn : store_.turns()) {
        turn_tokens_.push_back(tokenize(turn.speaker + " " + turn.text));
        total += turn_tokens_.back().size();
    }
    avg_len_ = turn_tokens_.empty() ? 1.0 : double(total) / double(turn_tokens_.size());
    if (avg_len_ <= 0.0) avg_len_ = 1.0;
}

std::vector<EvidenceItem> RawTurnRetriever::retrieve(const std::string& query, std::size_t k) {
    auto q_tokens = tokenize(query);
    std::vector<std::string> unique(q_tokens);
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    struct Scored {
        std::size_t index;
        double score;
    };
    std::vector<Scored> scored;
    for (std::size_t i = 0; i < turn_tokens_.size(); ++i) {
        const auto& toks = turn_tokens_[i];
        double len_norm = 1.0 - b_ + b_ * double(toks.size()) / avg_len_;
        double score = 0.0;
        for (const auto& term : unique) {
            double freq = double(std::count(toks.begin(), toks.end(), term));
            if (freq > 0.0) score += freq * (k1_ + 1.0) / (freq + k1_ * len_norm);
        }
        if (score > 0.0) scored.push_back({i, score});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.index < b.index;
    });
    if (scored.size() > k) scored.resize(k);

    std::vector<EvidenceItem> out;
    for (const auto& s : scored) {
        const RawTurn& turn = store_.turns()[s.index];
        EvidenceItem item;
        item.id = turn.turn_id;
        item.text = turn.speaker + ": " + turn.text;
        item.source_turn = turn.turn_id;
        item.entity_scope = turn.speaker + " " + turn.text;
        item.score = s.score;
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<EvidenceItem> RawTurnRetriever::expand(const std::vector<EvidenceItem>&) {
    return {};
}

}  // namespace recall
