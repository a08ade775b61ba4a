#include "delib/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "delib/errors.hpp"

namespace delib {

using nlohmann::json;

std::string to_string(ToolKind kind) {
    switch (kind) {
        case ToolKind::trends: return "trends";
        case ToolKind::patents: return "patents";
        case ToolKind::scholar: return "scholar";
        case ToolKind::web_search: return "web_search";
        case ToolKind::community: return "community";
    }
    return "web_search";
}

ToolKind tool_kind_from_string(const std::string& s) {
    if (s == "trends") return ToolKind::trends;
    if (s == "patents") return ToolKind::patents;
    if (s == "scholar") return ToolKind::scholar;
    if (s == "web_search") return ToolKind::web_search;
    if (s == "community") return ToolKind::community;
    throw SchemaError("unknown tool kind '" + s + "'");
}

double RatingScale::snap(double value) const {
    double clamped = std::clamp(value, min, max);
    double steps = std::round((clamped - min) / step);
    return std::clamp(min + steps * step, min, max);
}

bool RatingScale::on_grid(double value, double eps) const {
    return contains(value) && std::abs(value - snap(value)) <= eps;
}

std::vector<double> RatingScale::grid_values() const {
    std::vector<double> values;
    for (double v = min; v <= max + 1e-9; v += step) values.push_back(snap(v));
    return values;
}

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, const std::string& id) {
    for (const auto& item : items)
        if (item.id == id) return &item;
    return nullptr;
}

}  // namespace

const Dimension* EvaluationModel::find_dimension(const std::string& id) const {
    return find_by_id(dimensions, id);
}
const ToolSpec* EvaluationModel::find_tool(const std::string& id) const {
    return find_by_id(tool_specs, id);
}
const AgentRole* EvaluationModel::find_agent(const std::string& id) const {
    return find_by_id(agents, id);
}
const Criterion* EvaluationModel::find_criterion(const std::string& id) const {
    return find_by_id(criteria, id);
}

const AgentRole& EvaluationModel::report_generator() {
    static const AgentRole role{
        "report_generator", "Report_Generator", "",
        "Synthesizes the criterion deliberation into a structured evaluation report.",
        {}, 0 /* unlimited */, false};
    return role;
}

void validate_model(const EvaluationModel& model) {
    if (model.dimensions.empty()) throw CardinalityError("model declares no dimensions");
    if (!(model.rating_scale.min < model.rating_scale.max))
        throw SchemaError("rating_scale requires min < max");
    if (!(model.rating_scale.step > 0)) throw SchemaError("rating_scale requires step > 0");

    std::set<std::string> dim_ids, tool_ids, agent_ids, criterion_ids;
    for (const auto& d : model.dimensions) {
        if (d.id.empty()) throw SchemaError("dimension with empty id");
        if (!dim_ids.insert(d.id).second) throw SchemaError("duplicate dimension id '" + d.id + "'");
    }
    for (const auto& t : model.tool_specs) {
        if (t.id.empty()) throw SchemaError("tool with empty id");
        if (!tool_ids.insert(t.id).second) throw SchemaError("duplicate tool id '" + t.id + "'");
        if (t.default_limit < 1)
            throw SchemaError("tool '" + t.id + "' requires default_limit >= 1");
    }
    for (const auto& a : model.agents) {
        if (a.id.empty()) throw SchemaError("agent with empty id");
        if (!agent_ids.insert(a.id).second) throw SchemaError("duplicate agent id '" + a.id + "'");
        if (!dim_ids.count(a.dimension))
            throw ReferenceError("agent '" + a.id + "' names unknown dimension '" + a.dimension + "'");
        if (a.max_sentences < 1)
            throw SchemaError("agent '" + a.id + "' requires max_sentences >= 1");
        for (const auto& tool : a.tools)
            if (!tool_ids.count(tool))
                throw ReferenceError("agent '" + a.id + "' names unknown tool '" + tool + "'");
    }
    for (const auto& c : model.criteria) {
        if (c.id.empty()) throw SchemaError("criterion with empty id");
        if (!criterion_ids.insert(c.id).second)
            throw SchemaError("duplicate criterion id '" + c.id + "'");
        if (!dim_ids.count(c.dimension))
            throw ReferenceError("criterion '" + c.id + "' names unknown dimension '" +
                                 c.dimension + "'");
        const AgentRole* coordinator = model.find_agent(c.coordinator);
        if (!coordinator)
            throw ReferenceError("criterion '" + c.id + "' names unknown agent '" +
                                 c.coordinator + "'");
        if (coordinator->dimension != c.dimension)
            throw SchemaError("criterion '" + c.id + "' coordinator '" + c.coordinator +
                              "' belongs to a different dimension");
        if (c.experts.empty())
            throw CardinalityError("criterion '" + c.id + "' declares no experts");
        std::set<std::string> seen;
        for (const auto& expert_id : c.experts) {
            const AgentRole* expert = model.find_agent(expert_id);
            if (!expert)
                throw ReferenceError("criterion '" + c.id + "' names unknown agent '" +
                                     expert_id + "'");
            if (expert->dimension != c.dimension)
                throw SchemaError("criterion '" + c.id + "' expert '" + expert_id +
                                  "' belongs to a different dimension");
            if (!seen.insert(expert_id).second)
                throw SchemaError("criterion '" + c.id + "' lists expert '" + expert_id +
                                  "' twice");
            if (expert_id == c.coordinator)
                throw SchemaError("criterion '" + c.id + "' lists its coordinator '" +
                                  expert_id + "' as an expert");
        }
    }
}

namespace {

const json& require(const json& doc, const char* key, const char* context) {
    if (!doc.is_object() || !doc.contains(key))
        throw SchemaError(std::string(context) + ": missing field '" + key + "'");
    return doc.at(key);
}

std::string require_string(const json& doc, const char* key, const char* context) {
    const json& v = require(doc, key, context);
    if (!v.is_string())
        throw SchemaError(std::string(context) + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

double require_number(const json& doc, const char* key, const char* context) {
    const json& v = require(doc, key, context);
    if (!v.is_number())
        throw SchemaError(std::string(context) + ": field '" + key + "' must be a number");
    return v.get<double>();
}

std::vector<std::string> string_list(const json& v, const char* context) {
    if (!v.is_array()) throw SchemaError(std::string(context) + ": expected a list");
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string())
            throw SchemaError(std::string(context) + ": list items must be strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace

EvaluationModel load_model_json(const json& doc) {
    EvaluationModel model;
    for (const auto& d : require(doc, "dimensions", "model")) {
        model.dimensions.push_back(
            {require_string(d, "id", "dimension"), require_string(d, "display_name", "dimension")});
    }
    for (const auto& t : require(doc, "tools", "model")) {
        ToolSpec spec;
        spec.id = require_string(t, "id", "tool");
        spec.display_name = require_string(t, "display_name", "tool");
        spec.kind = tool_kind_from_string(require_string(t, "kind", "tool"));
        spec.default_limit = static_cast<int>(require_number(t, "default_limit", "tool"));
        model.tool_specs.push_back(std::move(spec));
    }
    for (const auto& a : require(doc, "agents", "model")) {
        AgentRole agent;
        agent.id = require_string(a, "id", "agent");
        agent.display_name = require_string(a, "display_name", "agent");
        agent.dimension = require_string(a, "dimension", "agent");
        agent.description = require_string(a, "description", "agent");
        agent.tools = string_list(require(a, "tools", "agent"), "agent.tools");
        agent.max_sentences = static_cast<int>(require_number(a, "max_sentences", "agent"));
        const json& coord = require(a, "is_coordinator", "agent");
        if (!coord.is_boolean()) throw SchemaError("agent: field 'is_coordinator' must be a bool");
        agent.is_coordinator = coord.get<bool>();
        model.agents.push_back(std::move(agent));
    }
    for (const auto& c : require(doc, "criteria", "model")) {
        Criterion criterion;
        criterion.id = require_string(c, "id", "criterion");
        criterion.dimension = require_string(c, "dimension", "criterion");
        criterion.display_name = require_string(c, "display_name", "criterion");
        criterion.definition = require_string(c, "definition", "criterion");
        criterion.coordinator = require_string(c, "coordinator", "criterion");
        criterion.experts = string_list(require(c, "experts", "criterion"), "criterion.experts");
        model.criteria.push_back(std::move(criterion));
    }
    const json& scale = require(doc, "rating_scale", "model");
    model.rating_scale.min = require_number(scale, "min", "rating_scale");
    model.rating_scale.max = require_number(scale, "max", "rating_scale");
    model.rating_scale.step = require_number(scale, "step", "rating_scale");

    validate_model(model);
    return model;
}

EvaluationModel load_model(const std::string& config_document) {
    json doc;
    try {
        doc = json::parse(config_document);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config does not parse: ") + e.what());
    }
    return load_model_json(doc);
}

json model_to_json(const EvaluationModel& model) {
    json doc;
    doc["dimensions"] = json::array();
    for (const auto& d : model.dimensions)
        doc["dimensions"].push_back({{"id", d.id}, {"display_name", d.display_name}});
    doc["tools"] = json::array();
    for (const auto& t : model.tool_specs)
        doc["tools"].push_back({{"id", t.id},
                                {"display_name", t.display_name},
                                {"kind", to_string(t.kind)},
                                {"default_limit", t.default_limit}});
    doc["agents"] = json::array();
    for (const auto& a : model.agents)
        doc["agents"].push_back({{"id", a.id},
                                 {"display_name", a.display_name},
                                 {"dimension", a.dimension},
                                 {"description", a.description},
                                 {"tools", a.tools},
                                 {"max_sentences", a.max_sentences},
                                 {"is_coordinator", a.is_coordinator}});
    doc["criteria"] = json::array();
    for (const auto& c : model.criteria)
        doc["criteria"].push_back({{"id", c.id},
                                   {"dimension", c.dimension},
                                   {"display_name", c.display_name},
                                   {"definition", c.definition},
                                   {"coordinator", c.coordinator},
                                   {"experts", c.experts}});
    doc["rating_scale"] = {{"min", model.rating_scale.min},
                           {"max", model.rating_scale.max},
                           {"step", model.rating_scale.step}};
    return doc;
}

std::string serialize_model(const EvaluationModel& model) { return model_to_json(model).dump(2); }

EvaluationModel default_model() {
    EvaluationModel m;
    m.rating_scale = {0.0, 10.0, 0.5};
    m.dimensions = {
        {"technical_feasibility", "Technical Feasibility"},
        {"market_feasibility", "Market Feasibility"},
    };
    m.tool_specs = {
        {"google_trends", "Google Trends", ToolKind::trends, 3},
        {"google_patents", "Google Patents", ToolKind::patents, 3},
        {"google_scholar", "Google Scholar", ToolKind::scholar, 3},
        {"google_search", "Google Search", ToolKind::web_search, 3},
        {"reddit", "Reddit", ToolKind::community, 3},
    };
    m.agents = {
        {"rnd_director", "R&D Director", "technical_feasibility",
         "Systematizes the uncertainties of early innovation and drives internal coordination "
         "and communication to derive clear product concepts through multi-criteria evaluations "
         "of technology, market, and design.",
         {"google_trends"}, 3, true},
        {"ip_expert", "IP Expert", "technical_feasibility",
         "Evaluates the strategic value of innovative ideas, establishes patent application "
         "criteria, and proposes independent IP protection and utilization strategies during "
         "collaboration and strategic planning processes.",
         {"google_patents"}, 4, false},
        {"technical_expert", "Technical Expert", "technical_feasibility",
         "Objectively evaluates a product's technical feasibility, innovation, and viability, "
         "and based on this evaluation, proposes strategic technical directions necessary for "
         "the design and development process and new product integration.",
         {"google_scholar", "google_patents"}, 4, false},
        {"rnd_engineer", "R&D Engineer", "technical_feasibility",
         "Translates customer and market demands into technical specifications, validates the "
         "feasibility and competitiveness of new product concepts through innovative technology "
         "and systematic quality management, and connects this to implementation.",
         {"google_search", "reddit"}, 4, false},
        {"business_planner", "Business Planner", "market_feasibility",
         "Analyzes market opportunities, competitive environments, internal capabilities, and "
         "customer needs to evaluate the economic and strategic viability of product concepts "
         "and proposes optimal development directions and strategic positioning.",
         {"google_search"}, 3, true},
        {"customer_advocate", "Customer Advocate", "market_feasibility",
         "Continuously validates and improves product value by reflecting actual customer needs "
         "and experiences and serves as a driver in conveying the customer perspective to "
         "internal stakeholders to lead innovative product concepts and customer success.",
         {"reddit"}, 4, false},
        {"market_analyst", "Market Analyst", "market_feasibility",
         "Objectively evaluates the market fit and success potential of new product concepts "
         "based on consumer insights and market data to help development teams and executives "
         "craft the right product strategy.",
         {"google_trends", "google_search"}, 4, false},
        {"risk_manager", "Risk Manager", "market_feasibility",
         "Proactively identifies potential risks including financial, legal, market, and "
         "technology in new product development or projects, and evaluates their impact to "
         "control them to a manageable level.",
         {"google_search"}, 4, false},
    };
    m.criteria = {
        {"technical_viability", "technical_feasibility", "Technical Viability",
         "Whether the product concept can be practically realized given the feasibility of "
         "acquiring required technologies, development costs, technical capabilities, and "
         "technological integration",
         "rnd_director",
         {"technical_expert", "rnd_engineer", "ip_expert"}},
        {"patentability", "technical_feasibility", "Patentability",
         "Whether the product concept meets patent law requirements of novelty, "
         "non-obviousness, and industrial applicability for legal protection and competitive "
         "advantage",
         "rnd_director",
         {"ip_expert", "technical_expert"}},
        {"resource_requirement", "technical_feasibility", "Resource Requirement",
         "The adequacy and allocation efficiency of human, technological, financial, and "
         "organizational resources required for successful product realization",
         "rnd_director",
         {"rnd_engineer", "technical_expert"}},
        {"value_proposition", "market_feasibility", "Value Proposition",
         "Whether the product provides unique customer value, achieves competitive "
         "differentiation, and effectively addresses customers' economic, emotional, social, "
         "and functional needs",
         "business_planner",
         {"customer_advocate", "market_analyst", "risk_manager"}},
        {"market_potential", "market_feasibility", "Market Potential",
         "Whether the product can achieve commercial success given market acceptance, size, "
         "growth potential, customer demand, and competitive positioning for sustained "
         "profitability",
         "business_planner",
         {"market_analyst", "customer_advocate", "risk_manager"}},
        {"market_opportunity", "market_feasibility", "Market Opportunity",
         "The product's ability to fulfill unmet needs, create demand, and achieve competitive "
         "advantage in the target market",
         "business_planner",
         {"market_analyst", "customer_advocate", "risk_manager"}},
    };
    validate_model(m);
    return m;
}

Participants participants_for(const EvaluationModel& model, const std::string& criterion_id) {
    const Criterion* criterion = model.find_criterion(criterion_id);
    if (!criterion) throw ReferenceError("unknown criterion id '" + criterion_id + "'");
    Participants p;
    p.coordinator = *model.find_agent(criterion->coordinator);
    for (const auto& expert_id : criterion->experts) p.experts.push_back(*model.find_agent(expert_id));
    return p;
}

}  // namespace delib
