#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace delib {

/// Deterministic text -> unit vector (or zero vector for blank text).
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual size_t dimension() const = 0;
    virtual std::vector<double> embed(const std::string& text) const = 0;
};

/// Reference embedder: lowercase word tokens hashed into d buckets (FNV-1a),
/// bucket counts L2-normalized. Needs no model or network; deterministic
/// across platforms.
class HashingEmbedder : public Embedder {
public:
    explicit HashingEmbedder(size_t dimension = 256) : dimension_(dimension) {}
    size_t dimension() const override { return dimension_; }
    std::vector<double> embed(const std::string& text) const override;

private:
    size_t dimension_;
};

struct ChunkSource {
    enum class Kind { chat, tool };
    Kind kind = Kind::chat;
    std::string speaker;     // chat
    int turn_index = 0;      // chat
    std::string tool_id;     // tool
    std::uint64_t call_id = 0;  // tool

    static ChunkSource chat(std::string speaker, int turn_index) {
        ChunkSource s;
        s.kind = Kind::chat;
        s.speaker = std::move(speaker);
        s.turn_index = turn_index;
        return s;
    }
    static ChunkSource tool(std::string tool_id, std::uint64_t call_id) {
        ChunkSource s;
        s.kind = Kind::tool;
        s.tool_id = std::move(tool_id);
        s.call_id = call_id;
        return s;
    }
    /// Recency key used for retrieval tie-breaks.
    std::uint64_t recency() const {
        return kind == Kind::chat ? static_cast<std::uint64_t>(turn_index) : call_id;
    }
};

struct MemoryChunk {
    std::uint64_t id = 0;
    ChunkSource source;
    std::string text;
    std::vector<double> embedding;  // unit norm, or all-zero for blank text
};

struct RetrievedChunk {
    MemoryChunk chunk;
    double score = 0.0;
};

struct ChatRecord {
    std::string speaker;
    int turn_index = 0;
    std::string text;
};

/// Turn context assembled for one completion request:
/// retrieved tool chunks, retrieved older chat chunks, then the most recent
/// chat messages verbatim (oldest to newest).
struct ContextBundle {
    std::vector<RetrievedChunk> tool_chunks;
    std::vector<RetrievedChunk> chat_chunks;
    std::vector<ChatRecord> recent_chat;

    std::string render() const;
};

enum class MemoryScope { chat, tool, both };

struct ChunkingPolicy {
    size_t window = 2000;
    size_t overlap = 200;
};

/// Append-only dual memory of one criterion conversation. Chat and tool
/// chunks share a single strictly increasing id sequence; tool memory is
/// visible to every agent of the conversation.
class MemoryStore {
public:
    explicit MemoryStore(size_t dimension, ChunkingPolicy chunking = {})
        : dimension_(dimension), chunking_(chunking) {}

    /// Chunks the text, embeds each piece, and appends to the matching
    /// sequence. Chat appends also record the full message verbatim.
    /// Returns the new chunk ids in order.
    std::vector<std::uint64_t> append(const ChunkSource& source, const std::string& text,
                                      const Embedder& embedder);

    /// Top-k chunks in scope by cosine similarity with the query embedding.
    /// Order: score desc, recency desc, id desc. Zero-vector chunks are
    /// excluded rather than scored.
    std::vector<RetrievedChunk> retrieve(const std::string& query_text, size_t k,
                                         MemoryScope scope, const Embedder& embedder) const;

    /// Last recent_window chat messages verbatim (excluded from retrieval
    /// candidates), up to k retrieved older chat chunks, up to k tool chunks.
    ContextBundle build_context(const std::string& agent_id, size_t recent_window, size_t k,
                                const std::string& query_text, const Embedder& embedder) const;

    const std::vector<MemoryChunk>& chat_chunks() const { return chat_; }
    const std::vector<MemoryChunk>& tool_chunks() const { return tool_; }
    const std::vector<ChatRecord>& chat_messages() const { return messages_; }
    size_t dimension() const { return dimension_; }

    /// One record per chunk (id, source, text), line-delimited JSON; no
    /// embeddings, they are recomputed on load.
    void dump(std::ostream& out) const;
    static MemoryStore from_dump(std::istream& in, size_t dimension, const Embedder& embedder,
                                 ChunkingPolicy chunking = {});

private:
    std::vector<MemoryChunk> chat_;
    std::vector<MemoryChunk> tool_;
    std::vector<ChatRecord> messages_;
    size_t dimension_;
    ChunkingPolicy chunking_;
    std::uint64_t next_id_ = 0;
};

/// Sliding fixed-size character windows; the final window may be short.
std::vector<std::string> chunk_text(const std::string& text, const ChunkingPolicy& policy);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace delib
