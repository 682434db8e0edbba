#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "recall/memory_store.hpp"
#include "recall/providers.hpp"

using namespace recall;

namespace {

std::vector<double> unit_vec(std::size_t dim, std::size_t hot) {
    std::vector<double> v(dim, 0.0);
    v[hot % dim] = 1.0;
    return v;
}

MemoryStore store_with_turns(int n) {
    MemoryStore store;
    for (int i = 0; i < n; ++i)
        store.add_turn(RawTurn{"D1:" + std::to_string(i), "Jon", "2023-02-10", "turn " +
                                                                                  std::to_string(i)});
    return store;
}

std::vector<double> random_vec(std::mt19937& rng, std::size_t dim) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("ingest_turn stores the raw text verbatim and extracts tuples") {
    MemoryStore store;
    HashEmbeddingProvider embedder(32);
    ScriptedProvider extractor(
        {{CallRole::Extract, "", "Jon | lost | job\nJon | worked as | a banker"}}, true);

    RawTurn turn{"D1:1", "Jon", "2023-02-10", "I lost my job as a banker"};
    auto result = store.ingest_turn(turn, extractor, embedder);
    REQUIRE(result.new_tuples.size() == 2);
    CHECK(result.warnings.empty());

    const auto& t0 = store.tuple(result.new_tuples[0]);
    CHECK(t0.subject == "Jon");
    CHECK(t0.predicate == "lost");
    CHECK(t0.object == "job");
    CHECK(t0.source_turn == "D1:1");
    CHECK(t0.embedding.size() == 32);

    CHECK(store.find_turn("D1:1")->text == "I lost my job as a banker");
    // Two tuples from one turn are linked by a same-source edge.
    CHECK(store.edge_count(EdgeKind::SameSource) == 1);
}

TEST_CASE("duplicate turn ids are rejected") {
    MemoryStore store;
    HashEmbeddingProvider embedder(16);
    ScriptedProvider extractor({}, false);
    store.ingest_turn(RawTurn{"D1:1", "Jon", "", "hello"}, extractor, embedder);
    CHECK_THROWS_AS(store.ingest_turn(RawTurn{"D1:1", "Jon", "", "again"}, extractor, embedder),
                    StoreError);
}

TEST_CASE("empty turn text stores a raw record with zero tuples") {
    MemoryStore store;
    HashEmbeddingProvider embedder(16);
    ScriptedProvider extractor({}, true);  // strict: would throw if called
    auto result = store.ingest_turn(RawTurn{"D1:1", "Jon", "", ""}, extractor, embedder);
    CHECK(result.new_tuples.empty());
    CHECK(store.turns().size() == 1);
}

TEST_CASE("extractor failure keeps the raw turn and surfaces a warning") {
    MemoryStore store;
    HashEmbeddingProvider embedder(16);
    ScriptedProvider extractor({}, true);  // no entries -> strict failure
    auto result = store.ingest_turn(RawTurn{"D1:1", "Jon", "", "some text"}, extractor, embedder);
    CHECK(result.new_tuples.empty());
    REQUIRE(result.warnings.size() == 1);
    CHECK(store.turns().size() == 1);
}

TEST_CASE("relative temporal expressions resolve against the session timestamp") {
    MemoryStore store;
    HashEmbeddingProvider embedder(16);
    ScriptedProvider extractor(
        {{CallRole::Extract, "", "Gina | performed at | the hall | yesterday"}}, true);
    auto result = store.ingest_turn(RawTurn{"D2:1", "Gina", "2023-02-10", "we performed yesterday"},
                                    extractor, embedder);
    REQUIRE(result.new_tuples.size() == 1);
    CHECK(store.tuple(result.new_tuples[0]).event_time == "2023-02-09");
}

TEST_CASE("unresolvable time expressions leave event_time absent") {
    MemoryStore store;
    HashEmbeddingProvider embedder(16);
    ScriptedProvider extractor({{CallRole::Extract, "", "Gina | will perform | soon | someday"}},
                               true);
    auto result =
        store.ingest_turn(RawTurn{"D2:1", "Gina", "2023-02-10", "soon!"}, extractor, embedder);
    REQUIRE(result.new_tuples.size() == 1);
    CHECK(store.tuple(result.new_tuples[0]).event_time.empty());
}

TEST_CASE("ingest dedups identical normalized triples") {
    MemoryStore store;
    HashEmbeddingProvider embedder(16);
    ScriptedProvider extractor(
        {{CallRole::Extract, "", "Jon | lost | job\njon | LOST | Job"},
         {CallRole::Extract, "", "Jon | lost | job"}},
        true);
    auto r1 = store.ingest_turn(RawTurn{"D1:1", "Jon", "", "I lost my job"}, extractor, embedder);
    CHECK(r1.new_tuples.size() == 1);
    auto r2 = store.ingest_turn(RawTurn{"D1:2", "Jon", "", "job lost"}, extractor, embedder);
    CHECK(r2.new_tuples.empty());
    CHECK(store.tuples().size() == 1);
}

TEST_CASE("build_semantic_edges links cross-turn pairs at or above the threshold") {
    MemoryStore store = store_with_turns(3);
    store.add_tuple("a", "p", "x", "", "D1:0", unit_vec(8, 0));
    store.add_tuple("b", "p", "x", "", "D1:1", unit_vec(8, 0));  // identical embedding
    store.add_tuple("c", "p", "x", "", "D1:2", unit_vec(8, 3));  // orthogonal

    SUBCASE("identical embeddings from distinct turns get weight 1.0") {
        CHECK(store.build_semantic_edges(0.8) == 1);
        CHECK(store.edge_count(EdgeKind::Semantic) == 1);
        CHECK(store.edges().back().weight == doctest::Approx(1.0));
    }
    SUBCASE("rebuilding is idempotent") {
        CHECK(store.build_semantic_edges(0.8) == 1);
        CHECK(store.build_semantic_edges(0.8) == 0);
        CHECK(store.edge_count(EdgeKind::Semantic) == 1);
    }
    SUBCASE("threshold outside [-1,1] is rejected") {
        CHECK_THROWS_AS(store.build_semantic_edges(1.5), std::invalid_argument);
        CHECK_THROWS_AS(store.build_semantic_edges(-1.01), std::invalid_argument);
    }
}

TEST_CASE("a single tuple yields no edges") {
    MemoryStore store = store_with_turns(1);
    store.add_tuple("a", "p", "x", "", "D1:0", unit_vec(8, 0));
    CHECK(store.build_semantic_edges(0.0) == 0);
    CHECK(store.edges().empty());
}

TEST_CASE("same-turn pairs never get semantic edges") {
    MemoryStore store = store_with_turns(1);
    store.add_tuple("a", "p", "x", "", "D1:0", unit_vec(8, 0));
    store.add_tuple("b", "p", "y", "", "D1:0", unit_vec(8, 0));
    CHECK(store.build_semantic_edges(0.5) == 0);
    CHECK(store.edge_count(EdgeKind::SameSource) == 1);
}

TEST_CASE("semantic edge set equals a brute-force all-pairs cosine filter") {
    std::mt19937 rng(7);
    MemoryStore store = store_with_turns(5);
    std::vector<std::vector<double>> vecs;
    for (int i = 0; i < 5; ++i) {
        vecs.push_back(random_vec(rng, 12));
        store.add_tuple("s" + std::to_string(i), "p", "o", "", "D1:" + std::to_string(i),
                        vecs.back());
    }
    const double threshold = 0.1;
    store.build_semantic_edges(threshold);

    std::set<std::pair<TupleId, TupleId>> expected;
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = i + 1; j < vecs.size(); ++j)
            if (cosine_similarity(vecs[i], vecs[j]) >= threshold) expected.insert({i, j});

    std::set<std::pair<TupleId, TupleId>> got;
    for (const auto& e : store.edges())
        if (e.kind == EdgeKind::Semantic) got.insert({e.from, e.to});
    CHECK(got == expected);
}

TEST_CASE("retrieve ranks by cosine with ascending-id tie break") {
    MemoryStore store = store_with_turns(4);
    store.add_tuple("a", "p", "1", "", "D1:0", unit_vec(8, 0));
    store.add_tuple("b", "p", "2", "", "D1:1", unit_vec(8, 1));
    store.add_tuple("c", "p", "3", "", "D1:2", unit_vec(8, 0));  // ties with id 0
    auto hits = store.retrieve(unit_vec(8, 0), 3);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].id == 0);
    CHECK(hits[1].id == 2);
    CHECK(hits[0].score == doctest::Approx(1.0));
    CHECK(hits[1].score == doctest::Approx(1.0));
}

TEST_CASE("retrieve over an empty store yields an empty list") {
    MemoryStore store;
    CHECK(store.retrieve(unit_vec(8, 0), 5).empty());
    CHECK_THROWS_AS(store.retrieve(unit_vec(8, 0), 0), std::invalid_argument);
}

TEST_CASE("k larger than the store returns everything") {
    MemoryStore store = store_with_turns(2);
    store.add_tuple("a", "p", "1", "", "D1:0", unit_vec(8, 0));
    store.add_tuple("b", "p", "2", "", "D1:1", unit_vec(8, 1));
    CHECK(store.retrieve(unit_vec(8, 0), 3).size() == 2);
}

TEST_CASE("query identical to a stored embedding ranks that tuple first") {
    MemoryStore store = store_with_turns(3);
    std::mt19937 rng(3);
    store.add_tuple("a", "p", "1", "", "D1:0", random_vec(rng, 16));
    auto target = random_vec(rng, 16);
    auto id = store.add_tuple("b", "p", "2", "", "D1:1", target);
    store.add_tuple("c", "p", "3", "", "D1:2", random_vec(rng, 16));
    auto hits = store.retrieve(target, 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].id == id);
}

TEST_CASE("retrieval matches a full-scan oracle on 20 random tuples") {
    std::mt19937 rng(11);
    MemoryStore store = store_with_turns(20);
    std::vector<std::vector<double>> vecs;
    for (int i = 0; i < 20; ++i) {
        vecs.push_back(random_vec(rng, 24));
        store.add_tuple("s" + std::to_string(i), "p", "o", "", "D1:" + std::to_string(i),
                        vecs.back());
    }
    auto query = random_vec(rng, 24);

    struct Scored {
        TupleId id;
        double score;
    };
    std::vector<Scored> oracle;
    for (std::size_t i = 0; i < vecs.size(); ++i)
        oracle.push_back({TupleId(i), cosine_similarity(query, vecs[i])});
    std::sort(oracle.begin(), oracle.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });

    auto hits = store.retrieve(query, 10);
    REQUIRE(hits.size() == 10);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].id == oracle[i].id);
        CHECK(hits[i].score == doctest::Approx(oracle[i].score));
    }

    // Determinism across repeated calls.
    auto again = store.retrieve(query, 10);
    for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i].id == again[i].id);
}

TEST_CASE("graph_expand returns exactly the one-hop neighborhood") {
    MemoryStore store = store_with_turns(3);
    auto a = store.add_tuple("a", "p", "1", "", "D1:0", unit_vec(8, 0));
    auto b = store.add_tuple("b", "p", "2", "", "D1:1", unit_vec(8, 0));
    auto c = store.add_tuple("c", "p", "3", "", "D1:2", unit_vec(8, 0));
    store.build_semantic_edges(0.9);  // chain is fully connected here: a-b, a-c, b-c

    SUBCASE("isolated node expands to nothing") {
        MemoryStore lone = store_with_turns(1);
        auto x = lone.add_tuple("x", "p", "1", "", "D1:0", unit_vec(8, 0));
        CHECK(lone.graph_expand({x}).empty());
    }
    SUBCASE("seeds are excluded from the result") {
        auto out = store.graph_expand({a});
        CHECK(std::find(out.begin(), out.end(), a) == out.end());
        CHECK(out == std::vector<TupleId>{b, c});
    }
    SUBCASE("unknown seeds are rejected") {
        CHECK_THROWS_AS(store.graph_expand({999}), std::invalid_argument);
    }
}

TEST_CASE("one-hop only: neighbors-of-neighbors stay out") {
    // Chain a-b-c via orthogonal embedding trick: a~b and b~c similar, a,c not.
    MemoryStore store = store_with_turns(3);
    auto a = store.add_tuple("a", "p", "1", "", "D1:0", {1.0, 1.0, 0.0, 0.0});
    auto b = store.add_tuple("b", "p", "2", "", "D1:1", {0.0, 1.0, 0.0, 0.0});
    auto c = store.add_tuple("c", "p", "3", "", "D1:2", {0.0, 1.0, -1.0, 0.0});
    store.build_semantic_edges(0.7);
    // cos(a,b) = 1/sqrt(2) ~= .707, cos(b,c) = .707, cos(a,c) = 0.5 < threshold
    REQUIRE(store.edge_count(EdgeKind::Semantic) == 2);
    CHECK(store.graph_expand({a}) == std::vector<TupleId>{b});
    CHECK(store.graph_expand({b}) == std::vector<TupleId>{a, c});
}

TEST_CASE("graph expansion matches a brute-force adjacency oracle on a random graph") {
    std::mt19937 rng(23);
    MemoryStore store = store_with_turns(10);
    for (int i = 0; i < 10; ++i)
        store.add_tuple("s" + std::to_string(i), "p", "o", "", "D1:" + std::to_string(i),
                        random_vec(rng, 8));
    store.build_semantic_edges(0.2);

    // Oracle adjacency from the edge list.
    std::set<std::pair<TupleId, TupleId>> adj;
    for (const auto& e : store.edges()) {
        adj.insert({e.from, e.to});
        adj.insert({e.to, e.from});
    }
    std::vector<TupleId> seeds = {1, 4, 7};
    std::set<TupleId> expected;
    for (TupleId s : seeds)
        for (const auto& [from, to] : adj)
            if (from == s && std::find(seeds.begin(), seeds.end(), to) == seeds.end())
                expected.insert(to);
    auto got = store.graph_expand(seeds);
    CHECK(std::set<TupleId>(got.begin(), got.end()) == expected);
    CHECK(std::is_sorted(got.begin(), got.end()));
}

TEST_CASE("edge symmetry holds for every edge") {
    std::mt19937 rng(5);
    MemoryStore store = store_with_turns(8);
    for (int i = 0; i < 8; ++i)
        store.add_tuple("s" + std::to_string(i), "p", "o", "", "D1:" + std::to_string(i),
                        random_vec(rng, 8));
    store.build_semantic_edges(0.3);
    for (const auto& t : store.tuples()) {
        for (const auto& n : store.neighbors(t.id)) {
            const auto& back = store.neighbors(n.id);
            bool found = std::any_of(back.begin(), back.end(),
                                     [&](const Neighbor& m) { return m.id == t.id; });
            CHECK(found);
        }
    }
}

TEST_CASE("get_raw preserves order and skips unknown ids with notices") {
    MemoryStore store = store_with_turns(3);
    std::vector<std::string> notices;
    auto turns = store.get_raw({"D1:2", "D1:99", "D1:0"}, &notices);
    REQUIRE(turns.size() == 2);
    CHECK(turns[0].turn_id == "D1:2");
    CHECK(turns[1].turn_id == "D1:0");
    REQUIRE(notices.size() == 1);
    CHECK(notices[0].find("D1:99") != std::string::npos);
    CHECK(store.get_raw({}).empty());
}

TEST_CASE("snapshot round-trip preserves the whole store") {
    std::mt19937 rng(17);
    MemoryStore store = store_with_turns(10);
    for (int i = 0; i < 50; ++i)
        store.add_tuple("s" + std::to_string(i), "likes", "o" + std::to_string(i),
                        i % 3 == 0 ? "2023-02" : "", "D1:" + std::to_string(i % 10),
                        random_vec(rng, 16));
    store.build_semantic_edges(0.3);

    std::string path = "/tmp/recall_snapshot_test.json";
    store.save(path);
    auto loaded = MemoryStore::load(path);

    REQUIRE(loaded.turns().size() == store.turns().size());
    REQUIRE(loaded.tuples().size() == store.tuples().size());
    REQUIRE(loaded.edges().size() == store.edges().size());
    CHECK(loaded.embedding_dim() == store.embedding_dim());
    for (std::size_t i = 0; i < store.turns().size(); ++i) {
        CHECK(loaded.turns()[i].turn_id == store.turns()[i].turn_id);
        CHECK(loaded.turns()[i].text == store.turns()[i].text);
        CHECK(loaded.turns()[i].timestamp == store.turns()[i].timestamp);
    }
    for (std::size_t i = 0; i < store.tuples().size(); ++i) {
        const auto& a = store.tuples()[i];
        const auto& b = loaded.tuples()[i];
        CHECK(a.id == b.id);
        CHECK(a.subject == b.subject);
        CHECK(a.event_time == b.event_time);
        CHECK(a.source_turn == b.source_turn);
        CHECK(a.embedding == b.embedding);  // bit-exact numeric round trip
    }
    for (std::size_t i = 0; i < store.edges().size(); ++i) {
        CHECK(store.edges()[i].from == loaded.edges()[i].from);
        CHECK(store.edges()[i].to == loaded.edges()[i].to);
        CHECK(store.edges()[i].weight == loaded.edges()[i].weight);
    }
    std::remove(path.c_str());
}

TEST_CASE("empty store round-trips") {
    MemoryStore store;
    std::string path = "/tmp/recall_snapshot_empty.json";
    store.save(path);
    auto loaded = MemoryStore::load(path);
    CHECK(loaded.turns().empty());
    CHECK(loaded.tuples().empty());
    std::remove(path.c_str());
}

TEST_CASE("truncated or malformed snapshots are rejected without a partial store") {
    MemoryStore store = store_with_turns(2);
    store.add_tuple("a", "p", "x", "", "D1:0", unit_vec(4, 0));
    std::string path = "/tmp/recall_snapshot_trunc.json";
    store.save(path);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes.substr(0, bytes.size() / 2);
    out.close();

    CHECK_THROWS_AS(MemoryStore::load(path), SnapshotError);
    CHECK_THROWS_AS(MemoryStore::load("/tmp/does_not_exist_recall.json"), SnapshotError);

    std::ofstream bad(path, std::ios::binary | std::ios::trunc);
    bad << "{\"format\": \"something-else\", \"version\": 1}";
    bad.close();
    CHECK_THROWS_AS(MemoryStore::load(path), SnapshotError);
    std::remove(path.c_str());
}
