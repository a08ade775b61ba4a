#include "delib/csv.hpp"

#include "delib/errors.hpp"
#include "delib/strings.hpp"

namespace delib {

namespace {

std::vector<std::string> parse_row(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

bool CsvTable::has_column(const std::string& name) const {
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

size_t CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw TableError("table missing column '" + name + "'");
}

std::string CsvTable::cell(size_t row, const std::string& name) const {
    size_t col = column(name);
    if (row >= rows.size()) throw TableError("row index out of range");
    if (col >= rows[row].size()) return {};
    return rows[row][col];
}

CsvTable parse_csv(const std::string& text, char delimiter) {
    CsvTable table;
    bool first = true;
    for (const auto& line : split_lines(text)) {
        if (trim(line).empty()) continue;
        auto fields = parse_row(line, delimiter);
        if (first) {
            for (auto& f : fields) table.header.push_back(trim(f));
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty()) throw TableError("empty table: no header row");
    return table;
}

}  // namespace delib
