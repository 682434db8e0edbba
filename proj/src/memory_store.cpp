#include "recall/memory_store.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "recall/dates.hpp"
#include "recall/prompts.hpp"
#include "recall/text.hpp"

namespace recall {

using nlohmann::json;

std::string IndexTuple::text() const {
    std::string out = subject + " " + predicate + " " + object;
    if (!event_time.empty()) out += " (time: " + event_time + ")";
    return out;
}

std::string MemoryStore::dedup_key(const IndexTuple& t) const {
    return to_lower(t.subject) + "\x1f" + to_lower(t.predicate) + "\x1f" + to_lower(t.object) +
           "\x1f" + t.event_time;
}

void MemoryStore::add_turn(const RawTurn& turn) {
    if (turn_index_.count(turn.turn_id))
        throw StoreError("duplicate turn id: " + turn.turn_id);
    turn_index_[turn.turn_id] = turns_.size();
    turns_.push_back(turn);
}

TupleId MemoryStore::insert_tuple(IndexTuple t) {
    t.id = next_id_++;
    dedup_[dedup_key(t)] = t.id;
    tuple_index_[t.id] = tuples_.size();

    // Same-source edges to every earlier tuple of this turn.
    auto& co_turn = turn_tuples_[t.source_turn];
    TupleId id = t.id;
    tuples_.push_back(std::move(t));
    for (TupleId other : co_turn) add_edge(id, other, EdgeKind::SameSource, 1.0);
    co_turn.push_back(id);
    return id;
}

TupleId MemoryStore::add_tuple(std::string subject, std::string predicate, std::string object,
                               std::string event_time, const std::string& source_turn,
                               std::vector<double> embedding) {
    if (subject.empty() || predicate.empty() || object.empty())
        throw StoreError("tuple fields must be non-empty");
    if (!turn_index_.count(source_turn))
        throw StoreError("tuple references unknown turn: " + source_turn);
    if (embedding_dim_ == 0) embedding_dim_ = embedding.size();
    if (embedding.size() != embedding_dim_)
        throw StoreError("embedding dimension mismatch");

    IndexTuple t;
    t.subject = std::move(subject);
    t.predicate = std::move(predicate);
    t.object = std::move(object);
    t.event_time = std::move(event_time);
    t.source_turn = source_turn;
    t.embedding = std::move(embedding);

    auto it = dedup_.find(dedup_key(t));
    if (it != dedup_.end()) return it->second;
    return insert_tuple(std::move(t));
}

IngestResult MemoryStore::ingest_turn(const RawTurn& turn, LLMProvider& extractor,
                                      EmbeddingProvider& embedder) {
    IngestResult result;
    add_turn(turn);
    if (trim(turn.text).empty()) return result;

    std::string response;
    try {
        auto req = prompts::render_extraction_prompt(turn.speaker, turn.timestamp, turn.text);
        response = extractor.chat(req, CallRole::Extract).text;
    } catch (const ProviderError& e) {
        result.warnings.push_back("extraction failed for turn " + turn.turn_id + ": " + e.what());
        return result;
    }

    auto reference = parse_date_like(turn.timestamp);
    for (const auto& fact : prompts::parse_extraction_response(response)) {
        std::string event_time;
        if (!fact.time_expr.empty()) {
            if (auto t = normalize_event_time(fact.time_expr, reference)) event_time = *t;
        }
        IndexTuple probe;
        probe.subject = fact.subject;
        probe.predicate = fact.predicate;
        probe.object = fact.object;
        probe.event_time = event_time;
        if (dedup_.count(dedup_key(probe))) continue;

        probe.source_turn = turn.turn_id;
        probe.embedding = embedder.embed(probe.text());
        if (embedding_dim_ == 0) embedding_dim_ = probe.embedding.size();
        if (probe.embedding.size() != embedding_dim_) {
            result.warnings.push_back("embedding dimension mismatch for turn " + turn.turn_id);
            continue;
        }
        result.new_tuples.push_back(insert_tuple(std::move(probe)));
    }
    return result;
}

void MemoryStore::add_edge(TupleId a, TupleId b, EdgeKind kind, double weight) {
    if (a == b) return;
    TupleId lo = std::min(a, b), hi = std::max(a, b);
    if (!edge_keys_.insert({lo, hi, int(kind)}).second) return;
    edges_.push_back(EdgeLink{lo, hi, kind, weight});
    adjacency_[lo].push_back(Neighbor{hi, kind, weight});
    adjacency_[hi].push_back(Neighbor{lo, kind, weight});
}

std::size_t MemoryStore::build_semantic_edges(double threshold) {
    if (threshold < -1.0 || threshold > 1.0)
        throw std::invalid_argument("semantic edge threshold must be in [-1,1]");
    std::size_t created = 0;
    for (std::size_t i = 0; i < tuples_.size(); ++i) {
        for (std::size_t j = i + 1; j < tuples_.size(); ++j) {
            const auto& a = tuples_[i];
            const auto& b = tuples_[j];
            if (a.source_turn == b.source_turn) continue;
            double sim = cosine_similarity(a.embedding, b.embedding);
            if (sim < threshold) continue;
            std::size_t before = edges_.size();
            add_edge(a.id, b.id, EdgeKind::Semantic, sim);
            if (edges_.size() > before) ++created;
        }
    }
    return created;
}

std::vector<RetrievalHit> MemoryStore::retrieve(const std::vector<double>& query_embedding,
                                                std::size_t k) const {
    if (k == 0) throw std::invalid_argument("retrieval size must be positive");
    std::vector<RetrievalHit> hits;
    hits.reserve(tuples_.size());
    for (const auto& t : tuples_)
        hits.push_back(RetrievalHit{t.id, cosine_similarity(query_embedding, t.embedding)});
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

const std::vector<Neighbor>& MemoryStore::neighbors(TupleId id) const {
    static const std::vector<Neighbor> kEmpty;
    auto it = adjacency_.find(id);
    return it == adjacency_.end() ? kEmpty : it->second;
}

std::vector<TupleId> MemoryStore::graph_expand(const std::vector<TupleId>& seeds) const {
    std::set<TupleId> seed_set;
    for (TupleId s : seeds) {
        if (!tuple_index_.count(s))
            throw std::invalid_argument("graph_expand: unknown tuple id " + std::to_string(s));
        seed_set.insert(s);
    }
    std::set<TupleId> out;
    for (TupleId s : seed_set)
        for (const Neighbor& n : neighbors(s))
            if (!seed_set.count(n.id)) out.insert(n.id);
    return {out.begin(), out.end()};
}

std::vector<RawTurn> MemoryStore::get_raw(const std::vector<std::string>& turn_ids,
                                          std::vector<std::string>* notices) const {
    std::vector<RawTurn> out;
    for (const auto& id : turn_ids) {
        auto it = turn_index_.find(id);
        if (it == turn_index_.end()) {
            if (notices) notices->push_back("unknown turn id skipped: " + id);
            continue;
        }
        out.push_back(turns_[it->second]);
    }
    return out;
}

bool MemoryStore::has_turn(const std::string& turn_id) const {
    return turn_index_.count(turn_id) != 0;
}

const RawTurn* MemoryStore::find_turn(const std::string& turn_id) const {
    auto it = turn_index_.find(turn_id);
    return it == turn_index_.end() ? nullptr : &turns_[it->second];
}

const IndexTuple& MemoryStore::tuple(TupleId id) const {
    auto it = tuple_index_.find(id);
    if (it == tuple_index_.end())
        throw std::invalid_argument("unknown tuple id " + std::to_string(id));
    return tuples_[it->second];
}

bool MemoryStore::has_tuple(TupleId id) const { return tuple_index_.count(id) != 0; }

std::size_t MemoryStore::edge_count(EdgeKind kind) const {
    std::size_t n = 0;
    for (const auto& e : edges_)
        if (e.kind == kind) ++n;
    return n;
}

void MemoryStore::save(const std::string& path) const {
    json doc;
    doc["format"] = "memory-snapshot";
    doc["version"] = 1;
    doc["embedding_dim"] = embedding_dim_;

    json raw = json::array();
    for (const auto& t : turns_)
        raw.push_back({{"turn_id", t.turn_id},
                       {"speaker", t.speaker},
                       {"timestamp", t.timestamp},
                       {"text", t.text}});
    doc["raw"] = std::move(raw);

    json index = json::array();
    for (const auto& t : tuples_) {
        json row = {{"id", t.id},
                    {"subject", t.subject},
                    {"predicate", t.predicate},
                    {"object", t.object},
                    {"source_turn", t.source_turn}};
        if (!t.event_time.empty()) row["event_time"] = t.event_time;
        row["embedding"] = t.embedding;
        index.push_back(std::move(row));
    }
    doc["index"] = std::move(index);

    json edges = json::array();
    for (const auto& e : edges_)
        edges.push_back({{"from", e.from},
                         {"to", e.to},
                         {"kind", e.kind == EdgeKind::SameSource ? "same_source" : "semantic"},
                         {"weight", e.weight}});
    doc["edges"] = std::move(edges);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("cannot open snapshot for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw SnapshotError("write failed for snapshot: " + path);
}

MemoryStore MemoryStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("cannot open snapshot: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw SnapshotError("malformed snapshot JSON: " + path);
    if (!doc.is_object() || doc.value("format", "") != "memory-snapshot")
        throw SnapshotError("not a memory snapshot: " + path);
    if (doc.value("version", -1) != 1)
        throw SnapshotError("unsupported snapshot version in " + path);

    MemoryStore store;
    try {
        store.embedding_dim_ = doc.value("embedding_dim", std::size_t{0});
        for (const auto& row : doc.at("raw")) {
            RawTurn t;
            t.turn_id = row.at("turn_id").get<std::string>();
            t.speaker = row.at("speaker").get<std::string>();
            t.timestamp = row.at("timestamp").get<std::string>();
            t.text = row.at("text").get<std::string>();
            store.add_turn(t);
        }
        for (const auto& row : doc.at("index")) {
            IndexTuple t;
            t.id = row.at("id").get<TupleId>();
            t.subject = row.at("subject").get<std::string>();
            t.predicate = row.at("predicate").get<std::string>();
            t.object = row.at("object").get<std::string>();
            t.event_time = row.value("event_time", "");
            t.source_turn = row.at("source_turn").get<std::string>();
            t.embedding = row.at("embedding").get<std::vector<double>>();
            if (t.subject.empty() || t.predicate.empty() || t.object.empty())
                throw SnapshotError("snapshot tuple with empty field");
            if (!store.turn_index_.count(t.source_turn))
                throw SnapshotError("snapshot tuple references unknown turn " + t.source_turn);
            if (t.embedding.size() != store.embedding_dim_)
                throw SnapshotError("snapshot embedding dimension mismatch");
            if (store.tuple_index_.count(t.id))
                throw SnapshotError("snapshot duplicate tuple id");
            store.dedup_[store.dedup_key(t)] = t.id;
            store.tuple_index_[t.id] = store.tuples_.size();
            store.next_id_ = std::max(store.next_id_, t.id + 1);
            store.turn_tuples_[t.source_turn].push_back(t.id);
            store.tuples_.push_back(std::move(t));
        }
        for (const auto& row : doc.at("edges")) {
            TupleId from = row.at("from").get<TupleId>();
            TupleId to = row.at("to").get<TupleId>();
            std::string kind = row.at("kind").get<std::string>();
            double weight = row.at("weight").get<double>();
            if (!store.tuple_index_.count(from) || !store.tuple_index_.count(to))
                throw SnapshotError("snapshot edge references unknown tuple");
            if (kind != "same_source" && kind != "semantic")
                throw SnapshotError("snapshot edge with unknown kind: " + kind);
            store.add_edge(from, to,
                           kind == "same_source" ? EdgeKind::SameSource : EdgeKind::Semantic,
                           weight);
        }
    } catch (const json::exception& e) {
        throw SnapshotError(std::string("snapshot schema violation: ") + e.what());
    } catch (const StoreError& e) {
        throw SnapshotError(std::string("snapshot inconsistency: ") + e.what());
    }
    return store;
}

}  // namespace recall
