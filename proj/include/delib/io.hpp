#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace delib {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// One JSON object per non-empty line.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace delib
