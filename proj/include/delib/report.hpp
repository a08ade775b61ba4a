#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "delib/orchestrator.hpp"
#include "delib/scoring.hpp"

namespace delib {

/// Criterion report: consensus narrative, per-agent insight sections, the
/// Rating Evolution table, final rating, and the generated report text last
/// (so the document ends with the FINAL_ANSWER sentinel).
std::string criterion_report_markdown(const CriterionOutcome& outcome,
                                      const EvaluationModel& model,
                                      const std::string& concept_title);

/// Structured mirror of the criterion report; round-trips through
/// criterion_outcome_from_json.
nlohmann::json criterion_outcome_to_json(const CriterionOutcome& outcome);
CriterionOutcome criterion_outcome_from_json(const nlohmann::json& doc);

/// Scorecard with per-criterion rows, the aggregate row, and optional rank
/// context ("2nd of 3").
std::string scorecard_markdown(const ConceptScorecard& scorecard, const EvaluationModel& model,
                               const std::optional<RankEntry>& rank_context = std::nullopt);
nlohmann::json scorecard_to_json(const ConceptScorecard& scorecard);

/// Transcript export records: one JSON object per completion.
std::vector<nlohmann::json> transcript_records(const CriterionOutcome& outcome);

}  // namespace delib
