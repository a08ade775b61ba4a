#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delib/csv.hpp"
#include "delib/model.hpp"

namespace delib {

struct RatingCell {
    std::string concept_id;
    std::string criterion_id;
    double rating = 0.0;
    std::string rater;  // "system" or an expert label
};

/// Cells of one rating sheet. Multiple raters may fill disjoint cells (the
/// expert split rates technical and market criteria separately); the merged
/// view exposes exactly one value per (concept, criterion).
class RatingTable {
public:
    void add(RatingCell cell);

    /// CSV with header concept,criterion,rating,rater.
    static RatingTable from_csv(const std::string& text);

    const std::vector<RatingCell>& cells() const { return cells_; }
    std::vector<std::string> concept_ids() const;   // first-appearance order
    std::vector<std::string> criterion_ids() const;

    std::optional<double> find(const std::string& concept_id,
                               const std::string& criterion_id) const;
    double at(const std::string& concept_id, const std::string& criterion_id) const;

    /// Aggregates as printed in a source sheet, kept for discrepancy checks.
    void set_printed_total(const std::string& concept_id, double total);
    const std::map<std::string, double>& printed_totals() const { return printed_totals_; }

private:
    std::vector<RatingCell> cells_;
    std::map<std::string, double> printed_totals_;
};

/// Unweighted sum of the criterion ratings. Throws TableError when any
/// required criterion is missing.
double aggregate(const std::map<std::string, double>& ratings,
                 const std::vector<std::string>& required_criteria);
double aggregate_for(const RatingTable& table, const std::string& concept_id,
                     const std::vector<std::string>& criteria);

struct RankEntry {
    std::string concept_id;
    double total = 0.0;
    int rank = 1;  // competition ranking; exact ties share a rank
    bool tied = false;
};

/// Descending by aggregate. Exact ties share a rank and are flagged.
std::vector<RankEntry> rank(const std::map<std::string, double>& aggregates);

std::string ordinal(int rank);  // 1 -> "1st"

/// Pairwise concordant minus discordant over total pairs; pairs tied in
/// either ordering count as neither.
double kendall_tau(const std::map<std::string, double>& a, const std::map<std::string, double>& b);

struct DeltaCell {
    std::string concept_id;
    std::string criterion_id;
    double system = 0.0;
    double expert = 0.0;
    double delta = 0.0;  // expert - system
};

struct ComparisonReport {
    std::vector<DeltaCell> cells;
    std::map<std::string, double> system_totals;
    std::map<std::string, double> expert_totals;
    std::map<std::string, double> subtotal_delta;           // per concept
    std::map<std::string, double> mean_delta_by_criterion;  // across concepts
    double mean_delta = 0.0;                                // over all cells
    std::vector<RankEntry> system_ranking;
    std::vector<RankEntry> expert_ranking;
    bool exact_rank_match = false;
    double tau = 0.0;
    /// Computed-vs-printed mismatches, e.g. a sheet whose printed aggregate
    /// disagrees with the sum of its own criterion cells.
    std::vector<std::string> discrepancies;
};

/// Aligns both tables over identical concept and criterion sets and computes
/// the delta report. Throws TableError on misaligned tables.
ComparisonReport compare(const RatingTable& system, const RatingTable& expert);

std::string comparison_to_markdown(const ComparisonReport& report);
nlohmann::json comparison_to_json(const ComparisonReport& report);

}  // namespace delib
