#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "delib/memory.hpp"
#include "delib/strings.hpp"

using namespace delib;

namespace {

// Brute-force reference slicer for the sliding-window arithmetic.
std::vector<std::string> slice_oracle(const std::string& text, size_t window, size_t overlap) {
    std::vector<std::string> out;
    size_t stride = window - overlap;
    size_t pos = 0;
    while (true) {
        out.push_back(text.substr(pos, window));
        if (pos + window >= text.size()) break;
        pos += stride;
    }
    return out;
}

std::string random_words(std::mt19937& rng, int count) {
    static const std::vector<std::string> vocab = {
        "panel", "oled",   "contrast", "market", "patent", "latency", "gamut",
        "pivot", "sensor", "depth",    "render", "editor", "studio",  "price"};
    std::string out;
    for (int i = 0; i < count; ++i) {
        if (i) out += ' ';
        out += vocab[rng() % vocab.size()];
    }
    return out;
}

}  // namespace

TEST_SUITE("memory_rag") {

TEST_CASE("hashing embedder properties") {
    HashingEmbedder embedder(256);

    SUBCASE("scaling invariance: repeated tokens keep cosine 1") {
        auto a = embedder.embed("abc abc");
        auto b = embedder.embed("abc");
        CHECK(cosine_similarity(a, b) == doctest::Approx(1.0));
    }
    SUBCASE("blank text maps to the zero vector") {
        auto z = embedder.embed("   ");
        CHECK(std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; }));
    }
    SUBCASE("disjoint vocabulary maps to orthogonal vectors") {
        // Pick two tokens verified to land in different buckets.
        std::vector<std::string> candidates = {"alpha", "omega", "delta", "sigma", "kappa"};
        std::string first = candidates[0], second;
        for (size_t i = 1; i < candidates.size(); ++i) {
            if (fnv1a64(candidates[i]) % 256 != fnv1a64(first) % 256) {
                second = candidates[i];
                break;
            }
        }
        REQUIRE(!second.empty());
        auto a = embedder.embed(first);
        auto b = embedder.embed(second);
        REQUIRE(cosine_similarity(a, a) == doctest::Approx(1.0));
        CHECK(cosine_similarity(a, b) == doctest::Approx(0.0));
    }
    SUBCASE("deterministic") {
        CHECK(embedder.embed("display panel") == embedder.embed("display panel"));
    }
    SUBCASE("unit norm within 1e-6") {
        auto v = embedder.embed("quantum dot backlight");
        double sq = 0;
        for (double x : v) sq += x * x;
        CHECK(std::sqrt(sq) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("chunking matches the brute-force slicer") {
    ChunkingPolicy policy{2000, 200};

    SUBCASE("short text stays one chunk") {
        std::string text(120, 'x');
        CHECK(chunk_text(text, policy).size() == 1);
    }
    SUBCASE("5000 chars at 2000/200 make 3 chunks") {
        std::string text(5000, 'y');
        auto chunks = chunk_text(text, policy);
        CHECK(chunks.size() == 3);
        CHECK(chunks == slice_oracle(text, 2000, 200));
    }
    SUBCASE("random lengths agree with the oracle") {
        std::mt19937 rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            size_t len = 1 + rng() % 9000;
            std::string text(len, 'a' + static_cast<char>(rng() % 26));
            CHECK(chunk_text(text, policy) == slice_oracle(text, 2000, 200));
        }
    }
}

TEST_CASE("append assigns strictly increasing ids and keeps chunks immutable") {
    HashingEmbedder embedder(64);
    MemoryStore store(64, {100, 10});
    auto ids1 = store.append(ChunkSource::chat("a", 1), std::string(250, 'q'), embedder);
    auto ids2 = store.append(ChunkSource::tool("google_trends", 1), std::string(150, 'r'), embedder);
    std::vector<std::uint64_t> all = ids1;
    all.insert(all.end(), ids2.begin(), ids2.end());
    for (size_t i = 1; i < all.size(); ++i) CHECK(all[i] > all[i - 1]);

    std::string first_text = store.chat_chunks().front().text;
    store.append(ChunkSource::chat("b", 2), "later message", embedder);
    CHECK(store.chat_chunks().front().text == first_text);
}

TEST_CASE("tool memory is visible regardless of appending agent") {
    HashingEmbedder embedder(64);
    MemoryStore store(64);
    store.append(ChunkSource::tool("reddit", 7), "community feedback on pivot stands", embedder);
    auto bundle = store.build_context("any_agent", 4, 3, "pivot stands", embedder);
    REQUIRE(bundle.tool_chunks.size() == 1);
    CHECK(bundle.tool_chunks[0].chunk.source.tool_id == "reddit");
}

TEST_CASE("retrieve basics") {
    HashingEmbedder embedder(128);
    MemoryStore store(128);

    SUBCASE("a chunk equal to the query scores 1.0") {
        store.append(ChunkSource::chat("a", 1), "quantum dot panel calibration", embedder);
        auto hits = store.retrieve("quantum dot panel calibration", 3, MemoryScope::chat, embedder);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].score == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("k = 0 yields nothing") {
        store.append(ChunkSource::chat("a", 1), "text", embedder);
        CHECK(store.retrieve("text", 0, MemoryScope::both, embedder).empty());
    }
    SUBCASE("empty store yields nothing") {
        CHECK(store.retrieve("anything", 5, MemoryScope::both, embedder).empty());
    }
}

TEST_CASE("retrieve matches the exhaustive cosine-sort oracle") {
    HashingEmbedder embedder(32);  // small dimension forces score ties via collisions
    std::mt19937 rng(20250101);

    for (int trial = 0; trial < 20; ++trial) {
        MemoryStore store(32);
        int chunk_count = 20 + static_cast<int>(rng() % 50);
        for (int i = 0; i < chunk_count; ++i) {
            if (rng() % 3 == 0)
                store.append(ChunkSource::tool("google_search", i), random_words(rng, 4),
                             embedder);
            else
                store.append(ChunkSource::chat("agent", i), random_words(rng, 4), embedder);
        }
        // Guaranteed ties: the same text twice at one turn index (score and
        // recency equal, id decides) and once more at a later turn.
        std::string dup = random_words(rng, 4);
        store.append(ChunkSource::chat("agent", chunk_count), dup, embedder);
        store.append(ChunkSource::chat("agent", chunk_count), dup, embedder);
        store.append(ChunkSource::chat("agent", chunk_count + 1), dup, embedder);
        std::string query = random_words(rng, 3);
        auto query_vec = embedder.embed(query);

        for (size_t k : {1u, 3u, 10u}) {
            auto got = store.retrieve(query, k, MemoryScope::both, embedder);

            struct Scored {
                const MemoryChunk* chunk;
                double score;
            };
            std::vector<Scored> oracle;
            for (const auto& c : store.chat_chunks()) oracle.push_back({&c, 0.0});
            for (const auto& c : store.tool_chunks()) oracle.push_back({&c, 0.0});
            for (auto& s : oracle) s.score = cosine_similarity(query_vec, s.chunk->embedding);
            std::sort(oracle.begin(), oracle.end(), [](const Scored& a, const Scored& b) {
                if (a.score != b.score) return a.score > b.score;
                if (a.chunk->source.recency() != b.chunk->source.recency())
                    return a.chunk->source.recency() > b.chunk->source.recency();
                return a.chunk->id > b.chunk->id;
            });
            if (oracle.size() > k) oracle.resize(k);

            REQUIRE(got.size() == oracle.size());
            for (size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].chunk.id == oracle[i].chunk->id);
                CHECK(got[i].score == doctest::Approx(oracle[i].score));
            }
        }
    }
}

TEST_CASE("retrieval is deterministic across repeated calls") {
    HashingEmbedder embedder(64);
    MemoryStore store(64);
    std::mt19937 rng(5);
    for (int i = 0; i < 40; ++i)
        store.append(ChunkSource::chat("a", i), random_words(rng, 5), embedder);
    auto a = store.retrieve("panel market", 7, MemoryScope::both, embedder);
    auto b = store.retrieve("panel market", 7, MemoryScope::both, embedder);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].chunk.id == b[i].chunk.id);
}

TEST_CASE("build_context window and exclusion rules") {
    HashingEmbedder embedder(64);
    MemoryStore store(64);

    SUBCASE("three messages under a window of five come back verbatim") {
        for (int i = 1; i <= 3; ++i)
            store.append(ChunkSource::chat("a", i), "message " + std::to_string(i), embedder);
        auto bundle = store.build_context("a", 5, 2, "message", embedder);
        CHECK(bundle.recent_chat.size() == 3);
        CHECK(bundle.chat_chunks.empty());  // nothing older than the window
        CHECK(bundle.recent_chat.front().turn_index == 1);
        CHECK(bundle.recent_chat.back().turn_index == 3);
    }
    SUBCASE("retrieval candidates exclude the verbatim window") {
        for (int i = 1; i <= 10; ++i)
            store.append(ChunkSource::chat("a", i), "topic " + std::to_string(i), embedder);
        auto bundle = store.build_context("a", 4, 2, "topic", embedder);
        CHECK(bundle.recent_chat.size() == 4);
        CHECK(bundle.recent_chat.front().turn_index == 7);
        CHECK(bundle.chat_chunks.size() <= 2);
        for (const auto& r : bundle.chat_chunks) CHECK(r.chunk.source.turn_index < 7);
    }
    SUBCASE("empty tool memory leaves the tool section empty") {
        store.append(ChunkSource::chat("a", 1), "hello", embedder);
        auto bundle = store.build_context("a", 2, 3, "hello", embedder);
        CHECK(bundle.tool_chunks.empty());
    }
}

TEST_CASE("dump and reload recompute embeddings") {
    HashingEmbedder embedder(64);
    MemoryStore store(64);
    store.append(ChunkSource::chat("a", 1), "first message", embedder);
    store.append(ChunkSource::tool("reddit", 2), "tool result text", embedder);

    std::ostringstream out;
    store.dump(out);
    std::istringstream in(out.str());
    MemoryStore reloaded = MemoryStore::from_dump(in, 64, embedder);

    REQUIRE(reloaded.chat_chunks().size() == 1);
    REQUIRE(reloaded.tool_chunks().size() == 1);
    CHECK(reloaded.chat_chunks()[0].text == store.chat_chunks()[0].text);
    CHECK(reloaded.chat_chunks()[0].id == store.chat_chunks()[0].id);
    CHECK(reloaded.tool_chunks()[0].embedding == store.tool_chunks()[0].embedding);
}

}  // TEST_SUITE
