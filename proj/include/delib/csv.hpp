#pragma once

#include <map>
#include <string>
#include <vector>

namespace delib {

/// Delimiter-separated table with a header row. Supports double-quoted
/// fields with embedded delimiters and "" escapes.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool has_column(const std::string& name) const;
    /// Index of a header column; throws TableError when absent.
    size_t column(const std::string& name) const;
    /// Cell by row index and column name; empty string when row is short.
    std::string cell(size_t row, const std::string& name) const;
};

CsvTable parse_csv(const std::string& text, char delimiter = ',');

}  // namespace delib
