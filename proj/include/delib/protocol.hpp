#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delib/model.hpp"

namespace delib {

/// One transcript entry of a criterion conversation.
struct Message {
    std::string speaker;  // agent id or "report_generator"
    int turn_index = 0;
    std::string body;
};

enum class RatingStance { propose, suggest_revision, agree };

std::string to_string(RatingStance stance);

struct ParsedRating {
    double value = 0.0;
    RatingStance stance = RatingStance::propose;
};

struct RatingEvent {
    std::string speaker;
    int turn_index = 0;
    double value = 0.0;
    RatingStance stance = RatingStance::propose;
};

struct RoutingDirective {
    enum class Kind { next_expert, report_generator };
    Kind kind = Kind::next_expert;
    std::string agent_id;  // set for next_expert

    static RoutingDirective to_report() { return {Kind::report_generator, {}}; }
    static RoutingDirective to_agent(std::string id) {
        return {Kind::next_expert, std::move(id)};
    }
    bool operator==(const RoutingDirective&) const = default;
};

struct ToolLimitNotice {
    std::string tool_id;
};

struct ToolRequest {
    std::string tool_id;
    std::string query;
};

struct ConsensusStatus {
    bool reached = false;
    std::optional<double> value;
    std::vector<std::string> holdouts;
};

/// Normalized display/id names accepted on the routing line.
/// Matching is case-insensitive with '_' and ' ' treated as equivalent.
class NameTable {
public:
    void add(const std::string& agent_id, const std::string& display_name);
    void add_report_generator();
    /// Participants of one criterion plus the Report_Generator sentinel.
    static NameTable for_criterion(const EvaluationModel& model, const std::string& criterion_id);

    /// Resolves a raw line to an agent id; nullopt when unknown.
    std::optional<std::string> resolve(const std::string& raw) const;

private:
    std::map<std::string, std::string> entries_;  // normalized -> agent id
};

/// Recognizes the three rating phrases case-insensitively, value written as
/// integer or decimal, optionally bracketed ("7", "7.0", "[7]"):
///   "I rate this concept X/10"                -> propose
///   "I suggest a rating of X/10"              -> suggest_revision
///   "I agree with the current rating of X/10" -> agree
/// The LAST match in the body wins (messages often restate peers' ratings
/// before giving their own). Returns nullopt when no phrase is present;
/// throws OffScaleRatingError when the value lies outside the scale.
std::optional<ParsedRating> parse_rating(const std::string& body, const RatingScale& scale);

/// The last non-empty line, trimmed and name-normalized, must match a known
/// participant or the Report_Generator sentinel. Throws MalformedRoutingError
/// carrying the offending line otherwise.
RoutingDirective parse_routing(const std::string& body, const NameTable& names);

/// Matches the literal phrase "Tool limit reached for <tool>". A notice naming
/// a tool missing from known_tools throws UnknownToolNoticeError.
std::optional<ToolLimitNotice> parse_tool_notice(const std::string& body,
                                                 const std::set<std::string>& known_tools);

/// Tool commands, one per line: "TOOL <tool id>: <query>".
std::vector<ToolRequest> parse_tool_requests(const std::string& body);

/// Consensus holds iff every expert has rated at least once and each expert's
/// latest event carries the value of the most recent event. Holdouts list the
/// experts violating this; an empty history leaves every expert a holdout.
ConsensusStatus detect_consensus(const std::vector<RatingEvent>& history,
                                 const std::vector<std::string>& experts);

/// Terminator-delimited sentences ('.', '!', '?' followed by whitespace or
/// end). Decimal points inside numbers do not terminate, and a final line
/// without any terminator (the routing line) is ignored.
int count_sentences(const std::string& body);

/// Canonical phrase for a stance/value pair; parse_rating inverts it.
std::string format_rating_phrase(RatingStance stance, double value);

}  // namespace delib
