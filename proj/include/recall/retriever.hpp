#pragma once
// Retrieval surface the loop engine runs against. Three variants share it:
// embedding search over tuples with one-hop expansion (full), the same
// without expansion (index-only), and lexical ranking over raw turns
// (raw-only).

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "recall/memory_store.hpp"
#include "recall/providers.hpp"

namespace recall {

// A retrieved unit of evidence. For tuples `entity_scope` is
// "subject object" (predicates excluded from entity matching); for raw turns
// it is the speaker plus the turn text.
struct EvidenceItem {
    std::string id;
    std::string text;
    std::string source_turn;
    std::string entity_scope;
    double score = 0.0;
};

class Retriever {
public:
    virtual ~Retriever() = default;

    // Ranked top-k evidence for a query string.
    virtual std::vector<EvidenceItem> retrieve(const std::string& query, std::size_t k) = 0;

    // One-hop expansion of the seed set (empty for variants without a graph).
    virtual std::vector<EvidenceItem> expand(const std::vector<EvidenceItem>& seeds) = 0;

    // Number of expand() calls that actually traversed the graph.
    std::size_t expansions_performed() const { return expansions_; }

protected:
    std::size_t expansions_ = 0;
};

// Embedding search over the Index layer; `expand_edges` gates the Edge layer.
class TupleRetriever final : public Retriever {
public:
    TupleRetriever(const MemoryStore& store, EmbeddingProvider& embedder, bool expand_edges);

    std::vector<EvidenceItem> retrieve(const std::string& query, std::size_t k) override;
    std::vector<EvidenceItem> expand(const std::vector<EvidenceItem>& seeds) override;

    static EvidenceItem to_evidence(const IndexTuple& tuple, double score);

private:
    const MemoryStore& store_;
    EmbeddingProvider& embedder_;
    bool expand_edges_;
};

// Term-frequency ranking with length normalization over raw turns (BM25-style
// saturation, no document-frequency weighting). No index or edges involved.
class RawTurnRetriever final : public Retriever {
public:
    explicit RawTurnRetriever(const MemoryStore& store, double k1 = 1.2, double b = 0.75);

    std::vector<EvidenceItem> retrieve(const std::string& query, std::size_t k) override;
    std::vector<EvidenceItem> expand(const std::vector<EvidenceItem>& seeds) override;

private:
    const MemoryStore& store_;
    double k1_;
    double b_;
    std::vector<std::vector<std::string>> turn_tokens_;
    double avg_len_ = 0.0;
};

}  // namespace recall
