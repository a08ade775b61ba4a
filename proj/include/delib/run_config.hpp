#pragma once

#include <map>
#include <string>
#include <vector>

#include "delib/model.hpp"

namespace delib {

/// Per-run settings shared by prompt composition and the deliberation loop.
struct RunConfig {
    /// Evaluation anchor date (ISO text). Mandatory: composition fails hard
    /// when empty, it is never defaulted silently.
    std::string current_date;
    int max_turns = 24;
    /// Per-tool invocation caps; tools not listed fall back to the spec default.
    std::map<std::string, int> tool_limits;
    int recent_window = 6;
    int retrieval_k = 3;
    RatingScale rating_scale;
    /// Combined system+role prompt length (chars) above which a warning is emitted.
    int prompt_char_budget = 8000;
    std::vector<std::string> report_sections = {"Consensus Summary", "Agent Insights",
                                                "Rating Evolution", "Final Rating"};

    int limit_for(const ToolSpec& tool) const {
        auto it = tool_limits.find(tool.id);
        return it != tool_limits.end() ? it->second : tool.default_limit;
    }
};

}  // namespace delib
