#pragma once
// Three-layer conversational memory: verbatim raw turns, embedded
// (subject, predicate, object, event_time) tuples, and a sparse edge graph
// (same-source + semantic-similarity links) supporting one-hop expansion.
//
// After ingestion and edge building finish, the store is read-only and safe
// for concurrent readers. Ingestion itself is single-writer.

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "recall/providers.hpp"
#include "recall/types.hpp"

namespace recall {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RetrievalHit {
    TupleId id = 0;
    double score = 0.0;
};

struct Neighbor {
    TupleId id = 0;
    EdgeKind kind = EdgeKind::SameSource;
    double weight = 1.0;
};

struct IngestResult {
    std::vector<TupleId> new_tuples;
    std::vector<std::string> warnings;
};

class MemoryStore {
public:
    MemoryStore() = default;

    // --- ingestion (single writer) ---

    // Stores the turn verbatim, factorizes it into embedded tuples via the
    // extractor, links co-turn tuples with same-source edges. Duplicate
    // turn ids are rejected; extractor failure keeps the raw turn and
    // surfaces a warning with zero tuples.
    IngestResult ingest_turn(const RawTurn& turn, LLMProvider& extractor,
                             EmbeddingProvider& embedder);

    // Fixture/builder API: same storage paths without the LLM round trip.
    void add_turn(const RawTurn& turn);
    TupleId add_tuple(std::string subject, std::string predicate, std::string object,
                      std::string event_time, const std::string& source_turn,
                      std::vector<double> embedding);

    // Links every tuple pair from distinct turns whose embedding cosine is
    // >= threshold with a SEMANTIC edge weighted by that cosine. Returns the
    // number of edges created by this call. Threshold outside [-1,1] is
    // rejected. Idempotent.
    std::size_t build_semantic_edges(double threshold);

    // --- retrieval (read-only) ---

    // Top-k exhaustive cosine scan, ties broken by ascending tuple id.
    // An empty store yields an empty list.
    std::vector<RetrievalHit> retrieve(const std::vector<double>& query_embedding,
                                       std::size_t k) const;

    // Union of the seeds' one-hop neighbors (both edge kinds) excluding the
    // seeds themselves, ascending by tuple id. Rejects unknown seeds.
    std::vector<TupleId> graph_expand(const std::vector<TupleId>& seeds) const;

    const std::vector<Neighbor>& neighbors(TupleId id) const;

    // Existing turns in input order; unknown ids are skipped, with one
    // notice per skipped id when `notices` is provided.
    std::vector<RawTurn> get_raw(const std::vector<std::string>& turn_ids,
                                 std::vector<std::string>* notices = nullptr) const;

    // --- snapshots ---

    void save(const std::string& path) const;
    static MemoryStore load(const std::string& path);

    // --- accessors ---

    bool has_turn(const std::string& turn_id) const;
    const RawTurn* find_turn(const std::string& turn_id) const;
    const IndexTuple& tuple(TupleId id) const;
    bool has_tuple(TupleId id) const;
    const std::vector<IndexTuple>& tuples() const { return tuples_; }
    const std::vector<RawTurn>& turns() const { return turns_; }
    const std::vector<EdgeLink>& edges() const { return edges_; }
    std::size_t edge_count(EdgeKind kind) const;
    std::size_t embedding_dim() const { return embedding_dim_; }

private:
    TupleId insert_tuple(IndexTuple t);
    void add_edge(TupleId a, TupleId b, EdgeKind kind, double weight);
    std::string dedup_key(const IndexTuple& t) const;

    std::vector<RawTurn> turns_;
    std::unordered_map<std::string, std::size_t> turn_index_;
    std::vector<IndexTuple> tuples_;
    std::unordered_map<TupleId, std::size_t> tuple_index_;
    std::unordered_map<std::string, TupleId> dedup_;
    std::unordered_map<std::string, std::vector<TupleId>> turn_tuples_;
    std::unordered_map<TupleId, std::vector<Neighbor>> adjacency_;
    std::vector<EdgeLink> edges_;
    std::set<std::tuple<TupleId, TupleId, int>> edge_keys_;
    TupleId next_id_ = 0;
    std::size_t embedding_dim_ = 0;
};

}  // namespace recall
