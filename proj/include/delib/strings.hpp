#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace delib {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_whitespace(std::string_view s);

/// Canonical form used for name matching: lowercase, '_' treated as space,
/// whitespace collapsed. "IP_Expert" and "ip expert" normalize identically.
std::string normalize_name(std::string_view s);

/// Normalization used for fixture query matching: lowercase + collapsed whitespace.
std::string normalize_query(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

/// Last line that is non-empty after trimming; empty string if none.
std::string last_nonempty_line(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// FNV-1a 64-bit. Stable across platforms; used for embeddings hashing,
/// request digests, and fixture checksums.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

/// Lowercase alphanumeric word tokens ("OLED-8K panel" -> {"oled", "8k", "panel"}).
std::vector<std::string> word_tokens(std::string_view s);

/// Fixed one-decimal formatting for grid ratings and their sums ("7.0", "44.5").
std::string format_rating(double value);

}  // namespace delib
