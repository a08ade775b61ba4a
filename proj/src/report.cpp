#include "delib/report.hpp"

#include "delib/errors.hpp"
#include "delib/strings.hpp"

namespace delib {

namespace {

std::string evolution_arrow(const std::vector<double>& values) {
    std::vector<std::string> parts;
    for (double v : values) parts.push_back(format_rating(v));
    return join(parts, " -> ");
}

std::string display_for(const EvaluationModel& model, const std::string& agent_id) {
    if (const AgentRole* agent = model.find_agent(agent_id)) return agent->display_name;
    if (agent_id == EvaluationModel::report_generator().id)
        return EvaluationModel::report_generator().display_name;
    return agent_id;
}

}  // namespace

std::string criterion_report_markdown(const CriterionOutcome& outcome,
                                      const EvaluationModel& model,
                                      const std::string& concept_title) {
    const Criterion* criterion = model.find_criterion(outcome.criterion_id);
    std::string title = criterion ? criterion->display_name : outcome.criterion_id;

    std::string md = "# " + title + " - " + concept_title + "\n\n";

    if (outcome.failed) {
        md += "Run failed: " + outcome.failure_reason + "\n\n";
    } else if (outcome.consensus) {
        md += "Final rating: " + format_rating(outcome.final_rating.value_or(0.0)) +
              "/10 (consensus reached in " + std::to_string(outcome.turns) + " turns)\n\n";
    } else {
        std::string rating = outcome.final_rating ? format_rating(*outcome.final_rating) + "/10"
                                                  : "none recorded";
        md += "Final rating: " + rating + " (no consensus; report forced at the turn cap)\n\n";
    }

    md += "## Agent Insights\n\n";
    for (const auto& [agent_id, values] : outcome.rating_evolution) {
        md += "### " + display_for(model, agent_id) + "\n\n";
        md += "Ratings: " + evolution_arrow(values) + "\n";
        for (auto it = outcome.transcript.rbegin(); it != outcome.transcript.rend(); ++it) {
            if (it->message.speaker != agent_id) continue;
            std::string excerpt = collapse_whitespace(it->message.body);
            if (excerpt.size() > 240) excerpt = excerpt.substr(0, 240) + "...";
            md += "Last statement: " + excerpt + "\n";
            break;
        }
        md += "\n";
    }

    md += "## Rating Evolution\n\n";
    md += "| Agent | Ratings |\n| --- | --- |\n";
    for (const auto& [agent_id, values] : outcome.rating_evolution)
        md += "| " + display_for(model, agent_id) + " | " + evolution_arrow(values) + " |\n";
    md += "\n";

    if (!outcome.report_text.empty()) {
        md += "## Generated Report\n\n";
        md += outcome.report_text;
        if (md.back() != '\n') md += '\n';
    }
    return md;
}

nlohmann::json criterion_outcome_to_json(const CriterionOutcome& outcome) {
    nlohmann::json doc;
    doc["concept_id"] = outcome.concept_id;
    doc["criterion_id"] = outcome.criterion_id;
    doc["conversation_id"] = outcome.conversation_id;
    doc["failed"] = outcome.failed;
    doc["failure_reason"] = outcome.failure_reason;
    doc["consensus"] = outcome.consensus;
    doc["forced_report"] = outcome.forced_report;
    if (outcome.final_rating)
        doc["final_rating"] = *outcome.final_rating;
    else
        doc["final_rating"] = nullptr;
    doc["turns"] = outcome.turns;
    doc["report_text"] = outcome.report_text;
    doc["rating_evolution"] = nlohmann::json::array();
    for (const auto& [agent_id, values] : outcome.rating_evolution)
        doc["rating_evolution"].push_back({{"agent", agent_id}, {"ratings", values}});
    doc["violations"] = outcome.violations;
    doc["phase_trace"] = outcome.phase_trace;
    return doc;
}

CriterionOutcome criterion_outcome_from_json(const nlohmann::json& doc) {
    CriterionOutcome outcome;
    try {
        outcome.concept_id = doc.at("concept_id").get<std::string>();
        outcome.criterion_id = doc.at("criterion_id").get<std::string>();
        outcome.conversation_id = doc.at("conversation_id").get<std::string>();
        outcome.failed = doc.at("failed").get<bool>();
        outcome.failure_reason = doc.at("failure_reason").get<std::string>();
        outcome.consensus = doc.at("consensus").get<bool>();
        outcome.forced_report = doc.at("forced_report").get<bool>();
        if (!doc.at("final_rating").is_null())
            outcome.final_rating = doc.at("final_rating").get<double>();
        outcome.turns = doc.at("turns").get<int>();
        outcome.report_text = doc.at("report_text").get<std::string>();
        for (const auto& entry : doc.at("rating_evolution"))
            outcome.rating_evolution.emplace_back(entry.at("agent").get<std::string>(),
                                                  entry.at("ratings").get<std::vector<double>>());
        outcome.violations = doc.at("violations").get<std::vector<std::string>>();
        outcome.phase_trace = doc.at("phase_trace").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed criterion report document: ") + e.what());
    }
    return outcome;
}

std::string scorecard_markdown(const ConceptScorecard& scorecard, const EvaluationModel& model,
                               const std::optional<RankEntry>& rank_context) {
    std::string md = "# Scorecard - " + scorecard.title + "\n\n";
    md += "| Criterion | Rating |\n| --- | --- |\n";
    for (const auto& [criterion_id, rating] : scorecard.ratings) {
        const Criterion* criterion = model.find_criterion(criterion_id);
        std::string name = criterion ? criterion->display_name : criterion_id;
        md += "| " + name + " | " + (rating ? format_rating(*rating) : std::string("-")) + " |\n";
    }
    auto total = scorecard.aggregate();
    md += "| Aggregate Score | " + (total ? format_rating(*total) : std::string("-")) + " |\n\n";
    if (scorecard.partial) md += "Scorecard is partial: at least one criterion failed.\n";
    if (rank_context)
        md += "Rank: " + ordinal(rank_context->rank) + (rank_context->tied ? " (tied)" : "") +
              "\n";
    return md;
}

nlohmann::json scorecard_to_json(const ConceptScorecard& scorecard) {
    nlohmann::json doc;
    doc["concept_id"] = scorecard.concept_id;
    doc["title"] = scorecard.title;
    doc["partial"] = scorecard.partial;
    doc["ratings"] = nlohmann::json::object();
    for (const auto& [criterion_id, rating] : scorecard.ratings) {
        if (rating)
            doc["ratings"][criterion_id] = *rating;
        else
            doc["ratings"][criterion_id] = nullptr;
    }
    auto total = scorecard.aggregate();
    if (total)
        doc["aggregate"] = *total;
    else
        doc["aggregate"] = nullptr;
    doc["criteria"] = nlohmann::json::array();
    for (const auto& outcome : scorecard.outcomes) {
        doc["criteria"].push_back({{"criterion_id", outcome.criterion_id},
                                   {"consensus", outcome.consensus},
                                   {"forced_report", outcome.forced_report},
                                   {"failed", outcome.failed},
                                   {"turns", outcome.turns}});
    }
    return doc;
}

std::vector<nlohmann::json> transcript_records(const CriterionOutcome& outcome) {
    std::vector<nlohmann::json> records;
    for (const auto& entry : outcome.transcript) {
        nlohmann::json rec;
        rec["turn_index"] = entry.message.turn_index;
        rec["speaker"] = entry.message.speaker;
        rec["body"] = entry.message.body;
        if (entry.rating)
            rec["rating"] = {{"value", entry.rating->value},
                             {"stance", to_string(entry.rating->stance)}};
        else
            rec["rating"] = nullptr;
        if (entry.routing)
            rec["routing"] = *entry.routing;
        else
            rec["routing"] = nullptr;
        rec["tool_calls"] = nlohmann::json::array();
        for (const auto& call : entry.tool_calls)
            rec["tool_calls"].push_back({{"call_id", call.call_id},
                                         {"tool", call.tool_id},
                                         {"query", call.query},
                                         {"status", to_string(call.status)}});
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace delib
