#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace delib {

struct Dimension {
    std::string id;
    std::string display_name;

    bool operator==(const Dimension&) const = default;
};

enum class ToolKind { trends, patents, scholar, web_search, community };

std::string to_string(ToolKind kind);
ToolKind tool_kind_from_string(const std::string& s);

struct ToolSpec {
    std::string id;
    std::string display_name;
    ToolKind kind = ToolKind::web_search;
    int default_limit = 3;

    bool operator==(const ToolSpec&) const = default;
};

struct AgentRole {
    std::string id;
    std::string display_name;
    std::string dimension;
    std::string description;
    std::vector<std::string> tools;
    int max_sentences = 4;
    bool is_coordinator = false;

    bool operator==(const AgentRole&) const = default;
};

struct Criterion {
    std::string id;
    std::string dimension;
    std::string display_name;
    std::string definition;  // injected verbatim into prompts
    std::string coordinator;
    std::vector<std::string> experts;  // order defines the repair fallback sequence

    bool operator==(const Criterion&) const = default;
};

struct RatingScale {
    double min = 0.0;
    double max = 10.0;
    double step = 0.5;

    bool contains(double value) const { return value >= min && value <= max; }
    /// Nearest grid value, clamped to [min, max].
    double snap(double value) const;
    bool on_grid(double value, double eps = 1e-9) const;
    std::vector<double> grid_values() const;

    bool operator==(const RatingScale&) const = default;
};

/// The declarative evaluation framework: dimensions, criteria, agent roles,
/// tool bindings, and the coordinator/expert mapping per criterion.
/// Immutable after construction; safe to share across concurrent runs.
struct EvaluationModel {
    std::vector<Dimension> dimensions;
    std::vector<ToolSpec> tool_specs;
    std::vector<AgentRole> agents;
    std::vector<Criterion> criteria;
    RatingScale rating_scale;

    const Dimension* find_dimension(const std::string& id) const;
    const ToolSpec* find_tool(const std::string& id) const;
    const AgentRole* find_agent(const std::string& id) const;
    const Criterion* find_criterion(const std::string& id) const;

    /// The agent that writes criterion reports. Not one of the deliberating
    /// roles; addressable by this fixed id in prompts, routing, and scripts.
    static const AgentRole& report_generator();

    bool operator==(const EvaluationModel&) const = default;
};

struct Participants {
    AgentRole coordinator;
    std::vector<AgentRole> experts;
};

/// Parses and validates a model config document (JSON surface).
/// Throws SchemaError / ReferenceError / CardinalityError; never returns a
/// partially valid model.
EvaluationModel load_model(const std::string& config_document);
EvaluationModel load_model_json(const nlohmann::json& doc);

/// Validates an already-assembled model against all structural invariants.
void validate_model(const EvaluationModel& model);

/// Built-in model: two dimensions, eight agents, six criteria, five tools.
EvaluationModel default_model();

nlohmann::json model_to_json(const EvaluationModel& model);
std::string serialize_model(const EvaluationModel& model);

/// Coordinator plus ordered expert list for a criterion.
/// Throws ReferenceError for an unknown criterion id.
Participants participants_for(const EvaluationModel& model, const std::string& criterion_id);

}  // namespace delib
