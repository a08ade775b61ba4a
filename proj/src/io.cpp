#include "delib/io.hpp"

#include <fstream>
#include <sstream>

#include "delib/errors.hpp"
#include "delib/strings.hpp"

namespace delib {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::vector<nlohmann::json> records;
    for (const auto& line : split_lines(read_file(path))) {
        if (trim(line).empty()) continue;
        try {
            records.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw IoError("malformed JSONL in " + path.string() + ": " + e.what());
        }
    }
    return records;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += rec.dump();
        out += '\n';
    }
    write_file(path, out);
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace delib
