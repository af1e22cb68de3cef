#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace distopt {

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

double parse_double(std::string_view text);

// Minimal RFC 4180 field quoting: fields containing a comma, quote or line
// break are wrapped in quotes with embedded quotes doubled.
std::string csv_escape(std::string_view field);

// Splits CSV text into rows of fields. Accepts LF or CRLF line endings and
// quoted fields. Blank lines are skipped.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

std::string to_hex(std::uint64_t value);

}  // namespace distopt
