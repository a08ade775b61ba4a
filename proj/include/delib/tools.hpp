#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "delib/model.hpp"
#include "delib/run_config.hpp"

namespace delib {

enum class ToolCallStatus { ok, backend_error, budget_exhausted };

std::string to_string(ToolCallStatus status);

struct ToolCall {
    std::uint64_t call_id = 0;
    std::string conversation_id;
    std::string agent_id;
    std::string tool_id;
    std::string query;
    int turn_index = 0;
    ToolCallStatus status = ToolCallStatus::ok;
    std::string result_text;  // empty unless ok
};

struct ToolResult {
    bool ok = false;
    std::string text;
};

/// Audit-log line format (also embedded in session records as type "tool").
nlohmann::json tool_call_to_json(const ToolCall& call);
ToolCall tool_call_from_json(const nlohmann::json& doc);

/// Backend contract answering one query for one tool.
class ToolBackend {
public:
    virtual ~ToolBackend() = default;
    virtual ToolResult fetch(const std::string& tool_id, const std::string& query) = 0;
};

/// Deterministic replay backend over (tool, normalized query) -> result text.
/// Query normalization: lowercase, collapse whitespace. Misses return the
/// default text in lenient mode or fail in strict mode.
class FixtureToolBackend : public ToolBackend {
public:
    FixtureToolBackend() = default;
    void add(const std::string& tool_id, const std::string& query, const std::string& result);
    void set_strict(bool strict) { strict_ = strict; }
    void set_default_result(std::string text) { default_result_ = std::move(text); }

    ToolResult fetch(const std::string& tool_id, const std::string& query) override;

    size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::string, std::string>, std::string> entries_;
    bool strict_ = false;
    std::string default_result_ = "no results";
};

/// Parses a fixture document: {"strict": bool?, "default_result": text?,
/// "entries": [{"tool": id, "query": text, "result": text}...]}.
std::shared_ptr<FixtureToolBackend> load_fixtures(const nlohmann::json& document);
std::shared_ptr<FixtureToolBackend> load_fixtures_file(const std::filesystem::path& path);

/// Rebuilds a replay backend from an audit log (ok entries become fixtures).
std::shared_ptr<FixtureToolBackend> fixtures_from_audit(const std::vector<ToolCall>& audit,
                                                        bool strict = true);

/// Thin HTTP adapter for live evidence services. Endpoint per tool comes from
/// config; the API key is read from environment variable
/// DELIB_TOOL_<ID>_KEY (id uppercased). Never used by the test suites.
class LiveToolBackend : public ToolBackend {
public:
    struct Config {
        std::map<std::string, std::string> endpoints;  // tool id -> URL, {query} substituted
        int timeout_seconds = 10;
    };
    explicit LiveToolBackend(Config config) : config_(std::move(config)) {}
    ToolResult fetch(const std::string& tool_id, const std::string& query) override;

private:
    Config config_;
};

/// Whether a tool's cap is shared by every agent in the conversation or
/// counted separately per agent.
enum class BudgetScope { per_conversation, per_agent };

/// Registry plus per-conversation budgets and a lossless audit log.
/// Budget mutation is serialized; distinct conversations are isolated.
class ToolPool {
public:
    ToolPool(const EvaluationModel& model, std::shared_ptr<ToolBackend> backend,
             std::map<std::string, int> limits = {},
             BudgetScope scope = BudgetScope::per_conversation);

    /// Runs one invocation. Exhausted budgets yield status budget_exhausted
    /// without touching the backend; any other attempt (ok or backend_error)
    /// consumes budget. Every call lands in the audit log.
    /// Throws UnknownToolError / BindingViolationError before consuming budget.
    ToolCall invoke(const std::string& conversation_id, const std::string& agent_id,
                    const std::string& tool_id, const std::string& query, int turn_index = 0);

    /// Remaining count; equals the limit before first use. Under per-agent
    /// scope the agent id selects whose counter to read.
    int remaining_budget(const std::string& conversation_id, const std::string& tool_id,
                         const std::string& agent_id = {}) const;

    int limit_for(const std::string& tool_id) const;

    std::vector<ToolCall> audit_log() const;
    std::vector<ToolCall> audit_for(const std::string& conversation_id) const;

private:
    std::string budget_key(const std::string& conversation_id, const std::string& agent_id) const;

    const EvaluationModel& model_;
    std::shared_ptr<ToolBackend> backend_;
    std::map<std::string, int> limits_;  // tool id -> limit
    BudgetScope scope_;
    std::map<std::string, std::map<std::string, int>> used_;  // budget key -> tool -> count
    std::vector<ToolCall> audit_;
    std::uint64_t next_call_id_ = 1;
    mutable std::mutex mutex_;
};

}  // namespace delib
