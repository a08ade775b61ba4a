#include "delib/backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "delib/errors.hpp"
#include "delib/io.hpp"
#include "delib/strings.hpp"

namespace delib {

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::live: return "live";
        case BackendKind::scripted: return "scripted";
        case BackendKind::replay: return "replay";
    }
    return "scripted";
}

std::string TurnRequest::digest() const {
    std::string blob = system_prompt;
    blob += '\x1f';
    blob += role_prompt;
    blob += '\x1f';
    blob += context.render();
    blob += '\x1f';
    blob += instruction;
    return fnv1a64_hex(blob);
}

void ScriptedBackend::push_line(const std::string& conversation_id, const std::string& agent_id,
                                const std::string& text) {
    std::lock_guard<std::mutex> lock(mutex_);
    queues_[conversation_id].push_back({agent_id, text});
}

Completion ScriptedBackend::complete(const TurnRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = queues_.find(request.conversation_id);
    if (it == queues_.end() || it->second.empty())
        throw ScriptExhaustedError("script exhausted for conversation '" +
                                   request.conversation_id + "'");
    Line& next = it->second.front();
    if (next.agent_id != request.agent_id)
        throw ScriptDivergenceError(next.agent_id, request.agent_id);
    Completion completion{next.text, kind_, std::chrono::milliseconds(0)};
    it->second.pop_front();
    return completion;
}

size_t ScriptedBackend::remaining(const std::string& conversation_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = queues_.find(conversation_id);
    return it == queues_.end() ? 0 : it->second.size();
}

std::shared_ptr<ScriptedBackend> scripted_from(const nlohmann::json& session_document) {
    auto backend = std::make_shared<ScriptedBackend>();
    try {
        for (const auto& [conversation_id, lines] :
             session_document.at("conversations").items()) {
            for (const auto& line : lines)
                backend->push_line(conversation_id, line.at("agent").get<std::string>(),
                                   line.at("text").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed scenario document: ") + e.what());
    }
    return backend;
}

std::shared_ptr<ScriptedBackend> scripted_from_file(const std::filesystem::path& path) {
    return scripted_from(read_json_file(path));
}

std::shared_ptr<ScriptedBackend> scripted_from_session(
    const std::vector<nlohmann::json>& records) {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->set_kind(BackendKind::replay);
    try {
        for (const auto& rec : records) {
            if (rec.value("type", "") != "turn") continue;
            backend->push_line(rec.at("conversation_id").get<std::string>(),
                               rec.at("agent_id").get<std::string>(),
                               rec.at("completion").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed session record: ") + e.what());
    }
    return backend;
}

void SessionRecorder::set_meta(nlohmann::json meta) {
    std::lock_guard<std::mutex> lock(mutex_);
    meta_ = std::move(meta);
    meta_["type"] = "meta";
}

void SessionRecorder::add(const std::string& conversation_id, const std::string& agent_id,
                          const std::string& request_digest, const std::string& completion) {
    nlohmann::json rec{{"type", "turn"},
                       {"conversation_id", conversation_id},
                       {"agent_id", agent_id},
                       {"request_digest", request_digest},
                       {"completion", completion}};
    std::lock_guard<std::mutex> lock(mutex_);
    turns_[conversation_id].push_back(std::move(rec));
}

nlohmann::json SessionRecorder::meta() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return meta_;
}

std::vector<nlohmann::json> SessionRecorder::turns_for(const std::string& conversation_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = turns_.find(conversation_id);
    return it == turns_.end() ? std::vector<nlohmann::json>{} : it->second;
}

std::vector<nlohmann::json> SessionRecorder::records(
    const std::vector<std::string>& conversation_order) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<nlohmann::json> out;
    if (!meta_.is_null()) out.push_back(meta_);
    auto emit = [&](const std::string& id) {
        auto it = turns_.find(id);
        if (it == turns_.end()) return;
        for (const auto& rec : it->second) out.push_back(rec);
    };
    for (const auto& id : conversation_order) emit(id);
    for (const auto& [id, _] : turns_)
        if (std::find(conversation_order.begin(), conversation_order.end(), id) ==
            conversation_order.end())
            emit(id);
    return out;
}

void SessionRecorder::write(const std::filesystem::path& path,
                            const std::vector<std::string>& conversation_order) const {
    write_jsonl(path, records(conversation_order));
}

Completion LiveChatBackend::complete(const TurnRequest& request) {
    nlohmann::json payload;
    payload["model"] = config_.model;
    payload["temperature"] = config_.temperature;
    payload["messages"] = nlohmann::json::array();
    payload["messages"].push_back({{"role", "system"}, {"content", request.system_prompt}});
    payload["messages"].push_back({{"role", "system"}, {"content", request.role_prompt}});
    std::string user = request.context.render();
    if (!user.empty()) user += "\n";
    user += request.instruction;
    payload["messages"].push_back({{"role", "user"}, {"content", user}});

    auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw TransportError("invalid endpoint '" + config_.endpoint + "'");
    auto path_begin = config_.endpoint.find('/', scheme_end + 3);
    std::string origin =
        path_begin == std::string::npos ? config_.endpoint : config_.endpoint.substr(0, path_begin);
    std::string path = path_begin == std::string::npos ? "/" : config_.endpoint.substr(path_begin);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error = "no attempts made";
    auto start = std::chrono::steady_clock::now();
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config_.backoff_base_ms * (1 << (attempt - 1))));
        }
        httplib::Client client(origin);
        client.set_connection_timeout(config_.timeout_seconds);
        client.set_read_timeout(config_.timeout_seconds);
        auto res = client.Post(path, headers, payload.dump(), "application/json");
        if (!res) {
            last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status >= 500) {  // transient server error
            last_error = "server status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw TransportError("chat endpoint returned status " + std::to_string(res->status));
        try {
            auto body = nlohmann::json::parse(res->body);
            std::string text =
                body.at("choices").at(0).at("message").at("content").get<std::string>();
            if (text.empty()) throw TransportError("chat endpoint returned empty completion");
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start);
            return {text, BackendKind::live, elapsed};
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("unexpected chat response shape: ") + e.what());
        }
    }
    throw TransportError("chat request failed after " + std::to_string(config_.max_attempts) +
                         " attempts: " + last_error);
}

}  // namespace delib
