#include "delib/prompt.hpp"

#include <algorithm>

#include "delib/errors.hpp"
#include "delib/io.hpp"
#include "delib/strings.hpp"

namespace delib {

namespace {

bool token_start(char c) { return c >= 'A' && c <= 'Z'; }
bool token_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == ' ' || c == '&';
}

struct TokenSpan {
    size_t begin;  // position of the opening bracket
    size_t end;    // one past the closing bracket
    std::string name;
};

// Scans for token spans. Bracketed prose that does not match the token
// grammar passes through; a candidate token cut off by end-of-input is
// malformed.
std::vector<TokenSpan> scan_tokens(const std::string& body) {
    std::vector<TokenSpan> spans;
    for (size_t i = 0; i < body.size(); ++i) {
        char open = body[i];
        if (open != '[' && open != '{') continue;
        char close = open == '[' ? ']' : '}';
        size_t j = i + 1;
        if (j >= body.size())
            throw MalformedTokenError("unbalanced '" + std::string(1, open) +
                                      "' at end of template");
        if (!token_start(body[j])) continue;
        ++j;
        while (j < body.size() && token_char(body[j])) ++j;
        if (j >= body.size())
            throw MalformedTokenError("unterminated token '" +
                                      body.substr(i, std::min<size_t>(24, body.size() - i)) + "'");
        if (body[j] != close) continue;  // bracketed prose, not a token
        spans.push_back({i, j + 1, body.substr(i + 1, j - i - 1)});
        i = j;
    }
    return spans;
}

}  // namespace

std::vector<std::string> extract_placeholders(const PromptTemplate& tmpl) {
    std::vector<std::string> names;
    for (const auto& span : scan_tokens(tmpl.body))
        if (std::find(names.begin(), names.end(), span.name) == names.end())
            names.push_back(span.name);
    return names;
}

Rendered render(const PromptTemplate& tmpl, const std::map<std::string, std::string>& bindings,
                const RenderOptions& options) {
    auto spans = scan_tokens(tmpl.body);

    Rendered out;
    std::set<std::string> used;
    size_t cursor = 0;
    for (const auto& span : spans) {
        out.text.append(tmpl.body, cursor, span.begin - cursor);
        auto it = bindings.find(span.name);
        if (it != bindings.end()) {
            out.text += it->second;
            used.insert(span.name);
        } else if (options.passthrough.count(span.name)) {
            out.text.append(tmpl.body, span.begin, span.end - span.begin);
        } else {
            throw MissingBindingError(span.name);
        }
        cursor = span.end;
    }
    out.text.append(tmpl.body, cursor, tmpl.body.size() - cursor);

    for (const auto& [name, value] : bindings)
        if (!used.count(name)) out.warnings.push_back("unused binding '" + name + "'");
    return out;
}

PromptSet PromptSet::load_dir(const std::filesystem::path& dir) {
    auto load = [&](const char* file, PromptLayer layer) {
        PromptTemplate tmpl;
        tmpl.layer = layer;
        tmpl.body = read_file(dir / file);
        if (trim(tmpl.body).empty()) throw IoError("empty prompt template: " + std::string(file));
        return tmpl;
    };
    PromptSet set;
    set.system = load("system.txt", PromptLayer::system);
    set.coordinator = load("coordinator.txt", PromptLayer::coordinator);
    set.expert = load("expert.txt", PromptLayer::expert);
    set.report_generator = load("report_generator.txt", PromptLayer::report_generator);
    return set;
}

const std::set<std::string>& model_facing_tokens() {
    static const std::set<std::string> tokens = {
        "X",
        "BRIEF REASON",
        "BRIEF REASON BASED ON DOMAIN EXPERTISE",
    };
    return tokens;
}

namespace {

std::string display_names(const std::vector<AgentRole>& agents) {
    std::vector<std::string> names;
    for (const auto& a : agents) names.push_back(a.display_name);
    return join(names, ", ");
}

}  // namespace

ComposedPrompt compose_prompts(const EvaluationModel& model, const std::string& agent_id,
                               const std::string& criterion_id, const RunConfig& run,
                               const PromptSet& prompts) {
    const Criterion* criterion = model.find_criterion(criterion_id);
    if (!criterion) throw ReferenceError("unknown criterion id '" + criterion_id + "'");
    Participants participants = participants_for(model, criterion_id);

    bool is_report = agent_id == EvaluationModel::report_generator().id;
    const AgentRole* agent = nullptr;
    const PromptTemplate* role_template = nullptr;
    if (is_report) {
        agent = &EvaluationModel::report_generator();
        role_template = &prompts.report_generator;
    } else if (agent_id == participants.coordinator.id) {
        agent = &participants.coordinator;
        role_template = &prompts.coordinator;
    } else {
        for (const auto& e : participants.experts)
            if (e.id == agent_id) agent = model.find_agent(agent_id);
        if (!agent)
            throw ParticipationError("agent '" + agent_id + "' does not participate in criterion '" +
                                     criterion_id + "'");
        role_template = &prompts.expert;
    }

    if (!is_report && run.current_date.empty()) throw MissingBindingError("CURRENT DATE");

    const Dimension* dimension = model.find_dimension(criterion->dimension);

    std::vector<std::string> tool_names;
    int tool_limit = 0;
    for (const auto& tool_id : agent->tools) {
        const ToolSpec* spec = model.find_tool(tool_id);
        tool_names.push_back(spec->id);
        int limit = run.limit_for(*spec);
        tool_limit = tool_limit == 0 ? limit : std::min(tool_limit, limit);
    }

    std::map<std::string, std::string> bindings;
    bindings["DIMENSION"] = dimension->display_name;
    bindings["CRITERIA"] = criterion->display_name;
    bindings["CRITERIA DESCRIPTION"] = criterion->definition;
    bindings["AGENT ROLE"] = agent->display_name;
    bindings["TOOL_NAMES"] = tool_names.empty() ? "none" : join(tool_names, ", ");
    bindings["TOOL_NAME"] = tool_names.empty() ? "none" : join(tool_names, " or ");
    bindings["TOOL_LIMIT"] = std::to_string(tool_limit);
    bindings["CURRENT DATE"] = run.current_date;
    bindings["MAX_SENTENCES"] = std::to_string(agent->max_sentences);
    bindings["COORDINATOR AGENT"] = participants.coordinator.display_name;
    bindings["EXPERT_CANDIDATES"] = display_names(participants.experts);
    bindings["REPORT_SECTIONS"] = join(run.report_sections, ", ");

    // Routing candidates for an expert are the other experts of the criterion;
    // the Report_Generator option is spelled out by the template itself.
    std::vector<AgentRole> others;
    for (const auto& e : participants.experts)
        if (e.id != agent->id) others.push_back(e);
    bindings["ROUTING_CANDIDATES"] = others.empty() ? participants.experts.front().display_name
                                                    : display_names(others);

    RenderOptions options{model_facing_tokens()};
    ComposedPrompt out;
    Rendered system = render(prompts.system, bindings, options);
    Rendered role = render(*role_template, bindings, options);
    out.system_prompt = std::move(system.text);
    out.role_prompt = std::move(role.text);

    size_t total = out.system_prompt.size() + out.role_prompt.size();
    if (run.prompt_char_budget > 0 && total > static_cast<size_t>(run.prompt_char_budget))
        out.warnings.push_back("prompt length " + std::to_string(total) +
                               " exceeds budget " + std::to_string(run.prompt_char_budget) +
                               " for agent '" + agent->id + "'");
    return out;
}

}  // namespace delib
