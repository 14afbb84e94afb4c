#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace scenegen {

// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

// Like format_number, but always carries a decimal point ("0.0", "2.0").
std::string format_float(double v);

std::optional<double> parse_number(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string to_lower(std::string_view s);

}  // namespace scenegen
