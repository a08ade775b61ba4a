#include "delib/protocol.hpp"

#include <cmath>
#include <regex>

#include "delib/errors.hpp"
#include "delib/strings.hpp"

namespace delib {

std::string to_string(RatingStance stance) {
    switch (stance) {
        case RatingStance::propose: return "propose";
        case RatingStance::suggest_revision: return "suggest_revision";
        case RatingStance::agree: return "agree";
    }
    return "propose";
}

void NameTable::add(const std::string& agent_id, const std::string& display_name) {
    entries_[normalize_name(agent_id)] = agent_id;
    entries_[normalize_name(display_name)] = agent_id;
}

void NameTable::add_report_generator() {
    const AgentRole& rg = EvaluationModel::report_generator();
    entries_[normalize_name(rg.id)] = rg.id;
    entries_[normalize_name(rg.display_name)] = rg.id;
}

NameTable NameTable::for_criterion(const EvaluationModel& model, const std::string& criterion_id) {
    Participants p = participants_for(model, criterion_id);
    NameTable table;
    table.add(p.coordinator.id, p.coordinator.display_name);
    for (const auto& e : p.experts) table.add(e.id, e.display_name);
    table.add_report_generator();
    return table;
}

std::optional<std::string> NameTable::resolve(const std::string& raw) const {
    auto it = entries_.find(normalize_name(raw));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::optional<ParsedRating> parse_rating(const std::string& body, const RatingScale& scale) {
    struct Pattern {
        std::regex re;
        RatingStance stance;
    };
    static const std::vector<Pattern> patterns = {
        {std::regex(R"(I\s+rate\s+this\s+concept\s+\[?(\d+(?:\.\d+)?)\]?\s*/\s*10)",
                    std::regex::icase),
         RatingStance::propose},
        {std::regex(R"(I\s+suggest\s+a\s+rating\s+of\s+\[?(\d+(?:\.\d+)?)\]?\s*/\s*10)",
                    std::regex::icase),
         RatingStance::suggest_revision},
        {std::regex(R"(I\s+agree\s+with\s+the\s+current\s+rating\s+of\s+\[?(\d+(?:\.\d+)?)\]?\s*/\s*10)",
                    std::regex::icase),
         RatingStance::agree},
    };

    // The agent's own verdict conventionally closes the message; earlier
    // phrases are usually quotes of peers. Keep the last match.
    std::optional<ParsedRating> result;
    long best_pos = -1;
    for (const auto& pattern : patterns) {
        for (auto it = std::sregex_iterator(body.begin(), body.end(), pattern.re);
             it != std::sregex_iterator(); ++it) {
            long pos = static_cast<long>(it->position(0));
            if (pos > best_pos) {
                best_pos = pos;
                result = ParsedRating{std::stod((*it)[1].str()), pattern.stance};
            }
        }
    }
    if (result && !scale.contains(result->value))
        throw OffScaleRatingError(result->value,
                                  "rating " + format_rating(result->value) + " outside scale [" +
                                      format_rating(scale.min) + ", " + format_rating(scale.max) +
                                      "]");
    return result;
}

RoutingDirective parse_routing(const std::string& body, const NameTable& names) {
    std::string line = last_nonempty_line(body);
    auto resolved = names.resolve(line);
    if (!resolved) throw MalformedRoutingError(line);
    if (*resolved == EvaluationModel::report_generator().id)
        return RoutingDirective::to_report();
    return RoutingDirective::to_agent(*resolved);
}

std::optional<ToolLimitNotice> parse_tool_notice(const std::string& body,
                                                 const std::set<std::string>& known_tools) {
    static const std::regex re(R"(Tool\s+limit\s+reached\s+for\s+([A-Za-z0-9_]+))",
                               std::regex::icase);
    std::smatch m;
    if (!std::regex_search(body, m, re)) return std::nullopt;
    std::string tool = to_lower(m[1].str());
    if (!known_tools.count(tool))
        throw UnknownToolNoticeError(tool, "tool limit notice names unknown tool '" + tool + "'");
    return ToolLimitNotice{tool};
}

std::vector<ToolRequest> parse_tool_requests(const std::string& body) {
    static const std::regex re(R"(^\s*TOOL\s+([A-Za-z0-9_]+)\s*:\s*(.*)$)");
    std::vector<ToolRequest> requests;
    for (const auto& line : split_lines(body)) {
        std::smatch m;
        if (!std::regex_match(line, m, re)) continue;
        std::string query = trim(m[2].str());
        if (query.empty()) continue;
        requests.push_back({to_lower(m[1].str()), query});
    }
    return requests;
}

ConsensusStatus detect_consensus(const std::vector<RatingEvent>& history,
                                 const std::vector<std::string>& experts) {
    ConsensusStatus status;
    if (history.empty()) {
        status.holdouts = experts;
        return status;
    }
    double current = history.back().value;
    for (const auto& expert : experts) {
        const RatingEvent* latest = nullptr;
        for (auto it = history.rbegin(); it != history.rend(); ++it) {
            if (it->speaker == expert) {
                latest = &*it;
                break;
            }
        }
        if (!latest || std::abs(latest->value - current) > 1e-9)
            status.holdouts.push_back(expert);
    }
    status.reached = status.holdouts.empty();
    if (status.reached) status.value = current;
    return status;
}

int count_sentences(const std::string& body) {
    auto lines = split_lines(body);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

    auto count_in = [](const std::string& text) {
        int count = 0;
        for (size_t i = 0; i < text.size(); ++i) {
            char c = text[i];
            if (c != '.' && c != '!' && c != '?') continue;
            bool at_end = i + 1 == text.size();
            if (at_end || std::isspace(static_cast<unsigned char>(text[i + 1]))) ++count;
        }
        return count;
    };

    // The protocol's routing line is a bare name; drop the final line when it
    // carries no terminator at all.
    if (!lines.empty() && count_in(lines.back()) == 0) lines.pop_back();

    int total = 0;
    for (const auto& line : lines) total += count_in(line);
    return total;
}

std::string format_rating_phrase(RatingStance stance, double value) {
    std::string v = format_rating(value);
    switch (stance) {
        case RatingStance::propose: return "I rate this concept " + v + "/10.";
        case RatingStance::suggest_revision: return "I suggest a rating of " + v + "/10.";
        case RatingStance::agree: return "I agree with the current rating of " + v + "/10.";
    }
    return {};
}

}  // namespace delib
