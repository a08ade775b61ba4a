#include "delib/finetune.hpp"

#include <optional>

#include "delib/errors.hpp"
#include "delib/strings.hpp"

namespace delib {

const std::vector<std::string>& metric_group(const Dimension& dimension) {
    static const std::vector<std::string> technical = {
        "response_time", "color_accuracy", "horizontal_viewing_angle", "resolution",
        "brightness"};
    static const std::vector<std::string> market = {"gaming", "office", "editing"};
    if (dimension.id.find("technical") != std::string::npos) return technical;
    if (dimension.id.find("market") != std::string::npos) return market;
    throw TableError("no label group for dimension '" + dimension.id + "'");
}

namespace {

std::optional<double> parse_metric(const std::string& cell) {
    std::string t = trim(cell);
    if (t.empty()) return std::nullopt;
    try {
        size_t consumed = 0;
        double value = std::stod(t, &consumed);
        if (consumed != t.size()) return std::nullopt;
        if (value < 0.0 || value > 10.0) return std::nullopt;
        return value;
    } catch (...) {
        return std::nullopt;
    }
}

}  // namespace

FinetunePrep build_finetune_records(const CsvTable& ratings_table, const Dimension& dimension,
                                    bool single_metric) {
    if (!ratings_table.has_column("description"))
        throw TableError("ratings table missing the 'description' column");
    const auto& metrics = metric_group(dimension);
    for (const auto& metric : metrics)
        if (!ratings_table.has_column(metric))
            throw TableError("ratings table missing metric column '" + metric + "'");

    RatingScale grid;  // labels snap to the rating grid
    FinetunePrep prep;
    for (size_t row = 0; row < ratings_table.rows.size(); ++row) {
        std::string description = trim(ratings_table.cell(row, "description"));
        std::map<std::string, double> labels;
        bool usable = !description.empty();
        for (const auto& metric : metrics) {
            auto value = parse_metric(ratings_table.cell(row, metric));
            if (!value) {
                usable = false;
                break;
            }
            labels[metric] = grid.snap(*value);
        }
        if (!usable) {
            ++prep.skipped_rows;
            continue;
        }
        if (single_metric) {
            for (const auto& metric : metrics)
                prep.records.push_back({description, {{metric, labels[metric]}}});
        } else {
            prep.records.push_back({description, std::move(labels)});
        }
    }
    if (prep.records.empty()) throw TableError("ratings table has zero usable rows");
    return prep;
}

std::string finetune_records_to_jsonl(const std::vector<FinetuneRecord>& records) {
    std::string out;
    for (const auto& record : records) {
        nlohmann::json rec;
        rec["input"] = record.input;
        rec["labels"] = nlohmann::json::object();
        for (const auto& [metric, value] : record.labels) rec["labels"][metric] = value;
        out += rec.dump();
        out += '\n';
    }
    return out;
}

}  // namespace delib
