#include "delib/memory.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "delib/errors.hpp"
#include "delib/strings.hpp"

namespace delib {

std::vector<double> HashingEmbedder::embed(const std::string& text) const {
    std::vector<double> vec(dimension_, 0.0);
    double norm_sq = 0.0;
    auto tokens = word_tokens(text);
    if (tokens.empty()) return vec;  // zero-vector sentinel for blank text
    for (const auto& token : tokens) vec[fnv1a64(token) % dimension_] += 1.0;
    for (double v : vec) norm_sq += v * v;
    double norm = std::sqrt(norm_sq);
    if (norm > 0)
        for (double& v : vec) v /= norm;
    return vec;
}

std::vector<std::string> chunk_text(const std::string& text, const ChunkingPolicy& policy) {
    std::vector<std::string> chunks;
    if (text.empty()) return chunks;
    if (policy.window == 0 || policy.overlap >= policy.window)
        throw Error("chunking requires overlap < window and window > 0");
    size_t stride = policy.window - policy.overlap;
    for (size_t pos = 0;; pos += stride) {
        chunks.push_back(text.substr(pos, policy.window));
        if (pos + policy.window >= text.size()) break;
    }
    return chunks;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error("embedding dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::uint64_t> MemoryStore::append(const ChunkSource& source, const std::string& text,
                                               const Embedder& embedder) {
    if (text.empty()) throw Error("cannot append empty text to memory");
    if (embedder.dimension() != dimension_)
        throw Error("embedding dimension mismatch: store " + std::to_string(dimension_) +
                    ", embedder " + std::to_string(embedder.dimension()));

    if (source.kind == ChunkSource::Kind::chat)
        messages_.push_back({source.speaker, source.turn_index, text});

    std::vector<std::uint64_t> ids;
    for (const auto& piece : chunk_text(text, chunking_)) {
        MemoryChunk chunk;
        chunk.id = next_id_++;
        chunk.source = source;
        chunk.text = piece;
        chunk.embedding = embedder.embed(piece);
        ids.push_back(chunk.id);
        (source.kind == ChunkSource::Kind::chat ? chat_ : tool_).push_back(std::move(chunk));
    }
    return ids;
}

namespace {

bool is_zero(const std::vector<double>& v) {
    for (double x : v)
        if (x != 0.0) return false;
    return true;
}

void rank_into(const std::vector<const MemoryChunk*>& candidates,
               const std::vector<double>& query, size_t k,
               std::vector<RetrievedChunk>& out) {
    std::vector<RetrievedChunk> scored;
    for (const MemoryChunk* chunk : candidates) {
        if (is_zero(chunk->embedding)) continue;
        scored.push_back({*chunk, cosine_similarity(query, chunk->embedding)});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const RetrievedChunk& a,
                                                      const RetrievedChunk& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.chunk.source.recency() != b.chunk.source.recency())
            return a.chunk.source.recency() > b.chunk.source.recency();
        return a.chunk.id > b.chunk.id;
    });
    if (scored.size() > k) scored.resize(k);
    for (auto& r : scored) out.push_back(std::move(r));
}

}  // namespace

std::vector<RetrievedChunk> MemoryStore::retrieve(const std::string& query_text, size_t k,
                                                  MemoryScope scope,
                                                  const Embedder& embedder) const {
    std::vector<RetrievedChunk> out;
    if (k == 0) return out;
    std::vector<double> query = embedder.embed(query_text);

    std::vector<const MemoryChunk*> candidates;
    if (scope == MemoryScope::chat || scope == MemoryScope::both)
        for (const auto& c : chat_) candidates.push_back(&c);
    if (scope == MemoryScope::tool || scope == MemoryScope::both)
        for (const auto& c : tool_) candidates.push_back(&c);

    rank_into(candidates, query, k, out);
    return out;
}

ContextBundle MemoryStore::build_context(const std::string& /*agent_id*/, size_t recent_window,
                                         size_t k, const std::string& query_text,
                                         const Embedder& embedder) const {
    // All conversation memory is visible to every agent; the agent id is kept
    // in the signature for per-agent scoping policies.
    ContextBundle bundle;

    size_t recent_begin = messages_.size() > recent_window ? messages_.size() - recent_window : 0;
    for (size_t i = recent_begin; i < messages_.size(); ++i)
        bundle.recent_chat.push_back(messages_[i]);

    std::vector<double> query = embedder.embed(query_text);
    if (k > 0) {
        std::vector<const MemoryChunk*> tool_candidates;
        for (const auto& c : tool_) tool_candidates.push_back(&c);
        rank_into(tool_candidates, query, k, bundle.tool_chunks);

        // Chat retrieval candidates exclude the verbatim window.
        int cutoff_turn =
            bundle.recent_chat.empty() ? -1 : bundle.recent_chat.front().turn_index;
        std::vector<const MemoryChunk*> chat_candidates;
        for (const auto& c : chat_)
            if (cutoff_turn < 0 || c.source.turn_index < cutoff_turn)
                chat_candidates.push_back(&c);
        rank_into(chat_candidates, query, k, bundle.chat_chunks);
    }
    return bundle;
}

std::string ContextBundle::render() const {
    std::string out;
    if (!tool_chunks.empty()) {
        out += "[Tool evidence]\n";
        for (const auto& r : tool_chunks)
            out += "- (" + r.chunk.source.tool_id + ") " + r.chunk.text + "\n";
    }
    if (!chat_chunks.empty()) {
        out += "[Earlier discussion]\n";
        for (const auto& r : chat_chunks)
            out += "- " + r.chunk.source.speaker + ": " + r.chunk.text + "\n";
    }
    if (!recent_chat.empty()) {
        out += "[Recent discussion]\n";
        for (const auto& m : recent_chat) out += m.speaker + ": " + m.text + "\n";
    }
    return out;
}

void MemoryStore::dump(std::ostream& out) const {
    auto write = [&out](const MemoryChunk& chunk) {
        nlohmann::json rec;
        rec["id"] = chunk.id;
        if (chunk.source.kind == ChunkSource::Kind::chat) {
            rec["source"] = {{"kind", "chat"},
                             {"speaker", chunk.source.speaker},
                             {"turn_index", chunk.source.turn_index}};
        } else {
            rec["source"] = {{"kind", "tool"},
                             {"tool_id", chunk.source.tool_id},
                             {"call_id", chunk.source.call_id}};
        }
        rec["text"] = chunk.text;
        out << rec.dump() << "\n";
    };
    // Interleave by id so the dump preserves append order.
    size_t ci = 0, ti = 0;
    while (ci < chat_.size() || ti < tool_.size()) {
        if (ti >= tool_.size() || (ci < chat_.size() && chat_[ci].id < tool_[ti].id))
            write(chat_[ci++]);
        else
            write(tool_[ti++]);
    }
}

MemoryStore MemoryStore::from_dump(std::istream& in, size_t dimension, const Embedder& embedder,
                                   ChunkingPolicy chunking) {
    MemoryStore store(dimension, chunking);
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IoError(std::string("malformed memory dump line: ") + e.what());
        }
        const auto& src = rec.at("source");
        MemoryChunk chunk;
        chunk.id = rec.at("id").get<std::uint64_t>();
        chunk.text = rec.at("text").get<std::string>();
        if (src.at("kind") == "chat") {
            chunk.source = ChunkSource::chat(src.at("speaker").get<std::string>(),
                                             src.at("turn_index").get<int>());
        } else {
            chunk.source = ChunkSource::tool(src.at("tool_id").get<std::string>(),
                                             src.at("call_id").get<std::uint64_t>());
        }
        chunk.embedding = embedder.embed(chunk.text);
        store.next_id_ = std::max(store.next_id_, chunk.id + 1);
        (chunk.source.kind == ChunkSource::Kind::chat ? store.chat_ : store.tool_)
            .push_back(std::move(chunk));
    }
    return store;
}

}  // namespace delib
