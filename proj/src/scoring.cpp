#include "delib/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "delib/errors.hpp"
#include "delib/strings.hpp"

namespace delib {

void RatingTable::add(RatingCell cell) {
    for (const auto& existing : cells_)
        if (existing.concept_id == cell.concept_id && existing.criterion_id == cell.criterion_id &&
            existing.rater == cell.rater)
            throw TableError("duplicate cell (" + cell.concept_id + ", " + cell.criterion_id +
                             ", " + cell.rater + ")");
    RatingScale grid;
    if (!grid.contains(cell.rating))
        throw TableError("rating " + std::to_string(cell.rating) + " outside [0, 10] for (" +
                         cell.concept_id + ", " + cell.criterion_id + ")");
    cells_.push_back(std::move(cell));
}

RatingTable RatingTable::from_csv(const std::string& text) {
    CsvTable csv = parse_csv(text);
    RatingTable table;
    for (size_t row = 0; row < csv.rows.size(); ++row) {
        RatingCell cell;
        cell.concept_id = trim(csv.cell(row, "concept"));
        cell.criterion_id = trim(csv.cell(row, "criterion"));
        std::string rating = trim(csv.cell(row, "rating"));
        cell.rater = csv.has_column("rater") ? trim(csv.cell(row, "rater")) : "system";
        if (cell.rater.empty()) cell.rater = "system";
        if (cell.concept_id.empty() || cell.criterion_id.empty() || rating.empty()) continue;
        try {
            cell.rating = std::stod(rating);
        } catch (...) {
            throw TableError("unparsable rating '" + rating + "' at row " + std::to_string(row + 2));
        }
        table.add(std::move(cell));
    }
    return table;
}

std::vector<std::string> RatingTable::concept_ids() const {
    std::vector<std::string> ids;
    for (const auto& cell : cells_)
        if (std::find(ids.begin(), ids.end(), cell.concept_id) == ids.end())
            ids.push_back(cell.concept_id);
    return ids;
}

std::vector<std::string> RatingTable::criterion_ids() const {
    std::vector<std::string> ids;
    for (const auto& cell : cells_)
        if (std::find(ids.begin(), ids.end(), cell.criterion_id) == ids.end())
            ids.push_back(cell.criterion_id);
    return ids;
}

std::optional<double> RatingTable::find(const std::string& concept_id,
                                        const std::string& criterion_id) const {
    std::optional<double> found;
    for (const auto& cell : cells_) {
        if (cell.concept_id != concept_id || cell.criterion_id != criterion_id) continue;
        if (found && std::abs(*found - cell.rating) > 1e-9)
            throw TableError("conflicting raters for (" + concept_id + ", " + criterion_id + ")");
        found = cell.rating;
    }
    return found;
}

double RatingTable::at(const std::string& concept_id, const std::string& criterion_id) const {
    auto found = find(concept_id, criterion_id);
    if (!found)
        throw TableError("missing rating for (" + concept_id + ", " + criterion_id + ")");
    return *found;
}

void RatingTable::set_printed_total(const std::string& concept_id, double total) {
    printed_totals_[concept_id] = total;
}

double aggregate(const std::map<std::string, double>& ratings,
                 const std::vector<std::string>& required_criteria) {
    double sum = 0.0;
    for (const auto& criterion : required_criteria) {
        auto it = ratings.find(criterion);
        if (it == ratings.end())
            throw TableError("missing criterion rating '" + criterion + "'");
        sum += it->second;
    }
    return sum;
}

double aggregate_for(const RatingTable& table, const std::string& concept_id,
                     const std::vector<std::string>& criteria) {
    std::map<std::string, double> ratings;
    for (const auto& criterion : criteria) ratings[criterion] = table.at(concept_id, criterion);
    return aggregate(ratings, criteria);
}

std::vector<RankEntry> rank(const std::map<std::string, double>& aggregates) {
    if (aggregates.empty()) throw TableError("rank requires at least one concept");
    std::vector<RankEntry> entries;
    for (const auto& [concept_id, total] : aggregates) entries.push_back({concept_id, total});
    std::stable_sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
        if (a.total != b.total) return a.total > b.total;
        return a.concept_id < b.concept_id;
    });
    for (size_t i = 0; i < entries.size(); ++i) {
        if (i > 0 && entries[i].total == entries[i - 1].total) {
            entries[i].rank = entries[i - 1].rank;  // competition ranking
            entries[i].tied = true;
            entries[i - 1].tied = true;
        } else {
            entries[i].rank = static_cast<int>(i) + 1;
        }
    }
    return entries;
}

std::string ordinal(int rank) {
    int mod100 = rank % 100;
    const char* suffix = "th";
    if (mod100 < 11 || mod100 > 13) {
        switch (rank % 10) {
            case 1: suffix = "st"; break;
            case 2: suffix = "nd"; break;
            case 3: suffix = "rd"; break;
        }
    }
    return std::to_string(rank) + suffix;
}

double kendall_tau(const std::map<std::string, double>& a,
                   const std::map<std::string, double>& b) {
    std::vector<std::string> keys;
    for (const auto& [key, _] : a) {
        if (!b.count(key)) throw TableError("kendall_tau inputs rank different concepts");
        keys.push_back(key);
    }
    if (b.size() != a.size()) throw TableError("kendall_tau inputs rank different concepts");
    size_t n = keys.size();
    if (n < 2) return 1.0;

    long concordant = 0, discordant = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            double da = a.at(keys[i]) - a.at(keys[j]);
            double db = b.at(keys[i]) - b.at(keys[j]);
            double prod = da * db;
            if (da == 0.0 || db == 0.0) continue;  // ties count as neither
            if (prod > 0)
                ++concordant;
            else
                ++discordant;
        }
    }
    double total_pairs = static_cast<double>(n * (n - 1)) / 2.0;
    return static_cast<double>(concordant - discordant) / total_pairs;
}

namespace {

bool same_ranking(const std::vector<RankEntry>& a, const std::vector<RankEntry>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].concept_id != b[i].concept_id || a[i].rank != b[i].rank) return false;
    return true;
}

void check_printed(const RatingTable& table, const std::map<std::string, double>& computed,
                   const std::string& label, std::vector<std::string>& out) {
    for (const auto& [concept_id, printed] : table.printed_totals()) {
        auto it = computed.find(concept_id);
        if (it == computed.end()) continue;
        if (std::abs(it->second - printed) > 1e-9)
            out.push_back(label + " aggregate for '" + concept_id + "' computes to " +
                          format_rating(it->second) + " but the sheet prints " +
                          format_rating(printed));
    }
}

}  // namespace

ComparisonReport compare(const RatingTable& system, const RatingTable& expert) {
    auto concepts = system.concept_ids();
    auto criteria = system.criterion_ids();
    {
        auto expert_concepts = expert.concept_ids();
        auto expert_criteria = expert.criterion_ids();
        auto sorted = [](std::vector<std::string> v) {
            std::sort(v.begin(), v.end());
            return v;
        };
        if (sorted(concepts) != sorted(expert_concepts) ||
            sorted(criteria) != sorted(expert_criteria))
            throw TableError("misaligned tables: concept/criterion sets differ");
    }

    ComparisonReport report;
    double delta_sum = 0.0;
    for (const auto& concept_id : concepts) {
        double system_total = 0.0, expert_total = 0.0, concept_delta = 0.0;
        for (const auto& criterion_id : criteria) {
            DeltaCell cell;
            cell.concept_id = concept_id;
            cell.criterion_id = criterion_id;
            cell.system = system.at(concept_id, criterion_id);
            cell.expert = expert.at(concept_id, criterion_id);
            cell.delta = cell.expert - cell.system;
            system_total += cell.system;
            expert_total += cell.expert;
            concept_delta += cell.delta;
            delta_sum += cell.delta;
            report.cells.push_back(cell);
        }
        report.system_totals[concept_id] = system_total;
        report.expert_totals[concept_id] = expert_total;
        report.subtotal_delta[concept_id] = concept_delta;
    }
    report.mean_delta = report.cells.empty() ? 0.0 : delta_sum / static_cast<double>(report.cells.size());
    for (const auto& criterion_id : criteria) {
        double sum = 0.0;
        for (const auto& cell : report.cells)
            if (cell.criterion_id == criterion_id) sum += cell.delta;
        report.mean_delta_by_criterion[criterion_id] = sum / static_cast<double>(concepts.size());
    }
    report.system_ranking = rank(report.system_totals);
    report.expert_ranking = rank(report.expert_totals);
    report.exact_rank_match = same_ranking(report.system_ranking, report.expert_ranking);
    report.tau = kendall_tau(report.system_totals, report.expert_totals);

    check_printed(system, report.system_totals, "system", report.discrepancies);
    check_printed(expert, report.expert_totals, "expert", report.discrepancies);
    return report;
}

std::string comparison_to_markdown(const ComparisonReport& report) {
    std::string md = "# Expert vs System Comparison\n\n";
    md += "| Concept | Criterion | Expert | System | Delta |\n";
    md += "| --- | --- | --- | --- | --- |\n";
    std::vector<std::string> concepts;
    for (const auto& cell : report.cells)
        if (std::find(concepts.begin(), concepts.end(), cell.concept_id) == concepts.end())
            concepts.push_back(cell.concept_id);
    for (const auto& concept_id : concepts) {
        for (const auto& cell : report.cells) {
            if (cell.concept_id != concept_id) continue;
            md += "| " + cell.concept_id + " | " + cell.criterion_id + " | " +
                  format_rating(cell.expert) + " | " + format_rating(cell.system) + " | " +
                  format_rating(cell.delta) + " |\n";
        }
        md += "| " + concept_id + " | subtotal | " +
              format_rating(report.expert_totals.at(concept_id)) + " | " +
              format_rating(report.system_totals.at(concept_id)) + " | " +
              format_rating(report.subtotal_delta.at(concept_id)) + " |\n";
    }
    md += "\n";
    char mean[32];
    std::snprintf(mean, sizeof mean, "%.4f", report.mean_delta);
    md += "Mean delta per cell: " + std::string(mean) + "\n\n";
    md += "Expert ranking:\n";
    for (const auto& entry : report.expert_ranking)
        md += "  " + ordinal(entry.rank) + " " + entry.concept_id + " (" +
              format_rating(entry.total) + ")\n";
    md += "System ranking:\n";
    for (const auto& entry : report.system_ranking)
        md += "  " + ordinal(entry.rank) + " " + entry.concept_id + " (" +
              format_rating(entry.total) + ")\n";
    md += "\nExact rank match: " + std::string(report.exact_rank_match ? "yes" : "no") + "\n";
    char tau[32];
    std::snprintf(tau, sizeof tau, "%.4f", report.tau);
    md += "Kendall tau: " + std::string(tau) + "\n";
    if (!report.discrepancies.empty()) {
        md += "\nDiscrepancies:\n";
        for (const auto& d : report.discrepancies) md += "  - " + d + "\n";
    }
    return md;
}

nlohmann::json comparison_to_json(const ComparisonReport& report) {
    nlohmann::json doc;
    doc["cells"] = nlohmann::json::array();
    for (const auto& cell : report.cells)
        doc["cells"].push_back({{"concept", cell.concept_id},
                                {"criterion", cell.criterion_id},
                                {"expert", cell.expert},
                                {"system", cell.system},
                                {"delta", cell.delta}});
    doc["system_totals"] = report.system_totals;
    doc["expert_totals"] = report.expert_totals;
    doc["subtotal_delta"] = report.subtotal_delta;
    doc["mean_delta_by_criterion"] = report.mean_delta_by_criterion;
    doc["mean_delta"] = report.mean_delta;
    doc["exact_rank_match"] = report.exact_rank_match;
    doc["kendall_tau"] = report.tau;
    auto ranking = [](const std::vector<RankEntry>& entries) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : entries)
            arr.push_back({{"concept", e.concept_id},
                           {"total", e.total},
                           {"rank", e.rank},
                           {"tied", e.tied}});
        return arr;
    };
    doc["system_ranking"] = ranking(report.system_ranking);
    doc["expert_ranking"] = ranking(report.expert_ranking);
    doc["discrepancies"] = report.discrepancies;
    return doc;
}

}  // namespace delib
