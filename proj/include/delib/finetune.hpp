#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "delib/csv.hpp"
#include "delib/model.hpp"

namespace delib {

/// One training record: product description in, per-metric ratings out.
/// Label keys come from exactly one label group (the dimension's metrics).
struct FinetuneRecord {
    std::string input;
    std::map<std::string, double> labels;

    bool operator==(const FinetuneRecord&) const = default;
};

struct FinetunePrep {
    std::vector<FinetuneRecord> records;
    int skipped_rows = 0;
};

/// Metric columns selected per dimension: the technical dimension uses the
/// five objective performance metrics, the market dimension the three
/// use-case ratings.
const std::vector<std::string>& metric_group(const Dimension& dimension);

/// Builds one record per table row (order-preserving). Rows missing any
/// group metric are skipped and counted. single_metric splits each row into
/// one record per metric instead of one multi-label record.
/// Throws TableError when the description column is absent or no row is usable.
FinetunePrep build_finetune_records(const CsvTable& ratings_table, const Dimension& dimension,
                                    bool single_metric = false);

/// Documented training-record format: one JSON object per line,
/// {"input": ..., "labels": {metric: value, ...}}.
std::string finetune_records_to_jsonl(const std::vector<FinetuneRecord>& records);

}  // namespace delib
