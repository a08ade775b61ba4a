#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "delib/memory.hpp"

namespace delib {

/// One completion request: the four prompt layers' output plus turn context.
struct TurnRequest {
    std::string conversation_id;
    std::string agent_id;
    std::string system_prompt;
    std::string role_prompt;
    ContextBundle context;
    std::string instruction;  // concept description plus turn directive

    std::string digest() const;
};

enum class BackendKind { live, scripted, replay };

std::string to_string(BackendKind kind);

struct Completion {
    std::string text;
    BackendKind backend_kind = BackendKind::scripted;
    std::chrono::milliseconds latency{0};
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual Completion complete(const TurnRequest& request) = 0;
};

/// Replays authored or recorded completions in order per conversation.
/// Requesting an agent out of script order raises ScriptDivergenceError;
/// running past the script raises ScriptExhaustedError.
class ScriptedBackend : public ChatBackend {
public:
    ScriptedBackend() = default;

    void push_line(const std::string& conversation_id, const std::string& agent_id,
                   const std::string& text);
    Completion complete(const TurnRequest& request) override;

    size_t remaining(const std::string& conversation_id) const;

    void set_kind(BackendKind kind) { kind_ = kind; }

private:
    struct Line {
        std::string agent_id;
        std::string text;
    };
    std::map<std::string, std::deque<Line>> queues_;
    BackendKind kind_ = BackendKind::scripted;
    mutable std::mutex mutex_;
};

/// Builds a scripted backend from a scenario document:
/// {"conversations": {"<id>": [{"agent": ..., "text": ...}, ...]}}.
std::shared_ptr<ScriptedBackend> scripted_from(const nlohmann::json& session_document);
std::shared_ptr<ScriptedBackend> scripted_from_file(const std::filesystem::path& path);

/// Builds a replay backend from a recorded session (the "turn" records of a
/// session JSONL, in order).
std::shared_ptr<ScriptedBackend> scripted_from_session(const std::vector<nlohmann::json>& records);

/// Collects request/completion pairs plus one meta record, written as
/// line-delimited JSON grouped by conversation in a caller-given order so the
/// file is deterministic under concurrent runs.
class SessionRecorder {
public:
    void set_meta(nlohmann::json meta);
    void add(const std::string& conversation_id, const std::string& agent_id,
             const std::string& request_digest, const std::string& completion);

    nlohmann::json meta() const;
    std::vector<nlohmann::json> turns_for(const std::string& conversation_id) const;
    std::vector<nlohmann::json> records(const std::vector<std::string>& conversation_order) const;
    void write(const std::filesystem::path& path,
               const std::vector<std::string>& conversation_order) const;

private:
    nlohmann::json meta_;
    std::map<std::string, std::vector<nlohmann::json>> turns_;
    mutable std::mutex mutex_;
};

/// Generic chat-completion HTTP adapter (system + messages wire shape).
/// Retries transient failures with exponential backoff before giving up.
class LiveChatBackend : public ChatBackend {
public:
    struct Config {
        std::string endpoint;  // e.g. https://host/v1/chat/completions
        std::string model;
        double temperature = 0.0;  // deterministic by default
        std::string api_key_env = "DELIB_LLM_API_KEY";
        int max_attempts = 3;
        int backoff_base_ms = 1000;  // 1s, 2s, 4s
        int timeout_seconds = 60;
    };
    explicit LiveChatBackend(Config config) : config_(std::move(config)) {}
    Completion complete(const TurnRequest& request) override;

private:
    Config config_;
};

}  // namespace delib
