#include "delib/tools.hpp"

#include <cstdlib>

#include <httplib.h>

#include "delib/errors.hpp"
#include "delib/io.hpp"
#include "delib/strings.hpp"

namespace delib {

std::string to_string(ToolCallStatus status) {
    switch (status) {
        case ToolCallStatus::ok: return "ok";
        case ToolCallStatus::backend_error: return "backend_error";
        case ToolCallStatus::budget_exhausted: return "budget_exhausted";
    }
    return "backend_error";
}

nlohmann::json tool_call_to_json(const ToolCall& call) {
    return {{"type", "tool"},
            {"call_id", call.call_id},
            {"conversation_id", call.conversation_id},
            {"agent_id", call.agent_id},
            {"tool_id", call.tool_id},
            {"query", call.query},
            {"turn_index", call.turn_index},
            {"status", to_string(call.status)},
            {"result_text", call.result_text}};
}

ToolCall tool_call_from_json(const nlohmann::json& doc) {
    ToolCall call;
    try {
        call.call_id = doc.at("call_id").get<std::uint64_t>();
        call.conversation_id = doc.at("conversation_id").get<std::string>();
        call.agent_id = doc.at("agent_id").get<std::string>();
        call.tool_id = doc.at("tool_id").get<std::string>();
        call.query = doc.at("query").get<std::string>();
        call.turn_index = doc.at("turn_index").get<int>();
        std::string status = doc.at("status").get<std::string>();
        call.status = status == "ok"              ? ToolCallStatus::ok
                      : status == "backend_error" ? ToolCallStatus::backend_error
                                                  : ToolCallStatus::budget_exhausted;
        call.result_text = doc.at("result_text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed tool call record: ") + e.what());
    }
    return call;
}

void FixtureToolBackend::add(const std::string& tool_id, const std::string& query,
                             const std::string& result) {
    entries_[{tool_id, normalize_query(query)}] = result;
}

ToolResult FixtureToolBackend::fetch(const std::string& tool_id, const std::string& query) {
    auto it = entries_.find({tool_id, normalize_query(query)});
    if (it != entries_.end()) return {true, it->second};
    if (strict_) return {false, {}};
    return {true, default_result_};
}

std::shared_ptr<FixtureToolBackend> load_fixtures(const nlohmann::json& document) {
    auto backend = std::make_shared<FixtureToolBackend>();
    try {
        if (document.contains("strict")) backend->set_strict(document.at("strict").get<bool>());
        if (document.contains("default_result"))
            backend->set_default_result(document.at("default_result").get<std::string>());
        for (const auto& entry : document.at("entries")) {
            backend->add(entry.at("tool").get<std::string>(),
                         entry.at("query").get<std::string>(),
                         entry.at("result").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed tool fixture document: ") + e.what());
    }
    return backend;
}

std::shared_ptr<FixtureToolBackend> load_fixtures_file(const std::filesystem::path& path) {
    return load_fixtures(read_json_file(path));
}

std::shared_ptr<FixtureToolBackend> fixtures_from_audit(const std::vector<ToolCall>& audit,
                                                        bool strict) {
    auto backend = std::make_shared<FixtureToolBackend>();
    backend->set_strict(strict);
    for (const auto& call : audit)
        if (call.status == ToolCallStatus::ok) backend->add(call.tool_id, call.query, call.result_text);
    return backend;
}

ToolResult LiveToolBackend::fetch(const std::string& tool_id, const std::string& query) {
    auto it = config_.endpoints.find(tool_id);
    if (it == config_.endpoints.end()) return {false, {}};

    std::string url = it->second;
    std::string encoded = httplib::detail::encode_url(query);
    if (auto pos = url.find("{query}"); pos != std::string::npos)
        url.replace(pos, 7, encoded);
    else
        url += (url.find('?') == std::string::npos ? "?q=" : "&q=") + encoded;

    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {false, {}};
    auto path_begin = url.find('/', scheme_end + 3);
    std::string origin = path_begin == std::string::npos ? url : url.substr(0, path_begin);
    std::string path = path_begin == std::string::npos ? "/" : url.substr(path_begin);

    httplib::Client client(origin);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);

    std::string key_var = "DELIB_TOOL_";
    for (char c : tool_id)
        key_var += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    key_var += "_KEY";
    httplib::Headers headers;
    if (const char* key = std::getenv(key_var.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    auto res = client.Get(path, headers);
    if (!res || res->status < 200 || res->status >= 300 || res->body.empty()) return {false, {}};
    return {true, res->body};
}

ToolPool::ToolPool(const EvaluationModel& model, std::shared_ptr<ToolBackend> backend,
                   std::map<std::string, int> limits, BudgetScope scope)
    : model_(model), backend_(std::move(backend)), limits_(std::move(limits)), scope_(scope) {
    for (const auto& spec : model_.tool_specs)
        if (!limits_.count(spec.id)) limits_[spec.id] = spec.default_limit;
}

std::string ToolPool::budget_key(const std::string& conversation_id,
                                 const std::string& agent_id) const {
    if (scope_ == BudgetScope::per_agent) return conversation_id + "\x1f" + agent_id;
    return conversation_id;
}

int ToolPool::limit_for(const std::string& tool_id) const {
    auto it = limits_.find(tool_id);
    if (it == limits_.end()) throw UnknownToolError("unknown tool '" + tool_id + "'");
    return it->second;
}

ToolCall ToolPool::invoke(const std::string& conversation_id, const std::string& agent_id,
                          const std::string& tool_id, const std::string& query, int turn_index) {
    if (!model_.find_tool(tool_id)) throw UnknownToolError("unknown tool '" + tool_id + "'");
    const AgentRole* agent = model_.find_agent(agent_id);
    if (!agent) throw ReferenceError("unknown agent '" + agent_id + "'");
    if (std::find(agent->tools.begin(), agent->tools.end(), tool_id) == agent->tools.end())
        throw BindingViolationError("agent '" + agent_id + "' is not bound to tool '" + tool_id +
                                    "'");

    std::lock_guard<std::mutex> lock(mutex_);
    ToolCall call;
    call.call_id = next_call_id_++;
    call.conversation_id = conversation_id;
    call.agent_id = agent_id;
    call.tool_id = tool_id;
    call.query = query;
    call.turn_index = turn_index;

    int limit = limit_for(tool_id);
    int& used = used_[budget_key(conversation_id, agent_id)][tool_id];
    if (used >= limit) {
        call.status = ToolCallStatus::budget_exhausted;
    } else {
        ++used;  // attempts consume budget, successful or not
        ToolResult result = backend_->fetch(tool_id, query);
        if (result.ok && !result.text.empty()) {
            call.status = ToolCallStatus::ok;
            call.result_text = result.text;
        } else {
            call.status = ToolCallStatus::backend_error;
        }
    }
    audit_.push_back(call);
    return call;
}

int ToolPool::remaining_budget(const std::string& conversation_id, const std::string& tool_id,
                               const std::string& agent_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    int limit = limit_for(tool_id);
    auto conv = used_.find(budget_key(conversation_id, agent_id));
    if (conv == used_.end()) return limit;
    auto it = conv->second.find(tool_id);
    if (it == conv->second.end()) return limit;
    return limit - it->second;
}

std::vector<ToolCall> ToolPool::audit_log() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return audit_;
}

std::vector<ToolCall> ToolPool::audit_for(const std::string& conversation_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<ToolCall> out;
    for (const auto& call : audit_)
        if (call.conversation_id == conversation_id) out.push_back(call);
    return out;
}

}  // namespace delib
