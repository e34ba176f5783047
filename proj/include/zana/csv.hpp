#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace zana {

std::string csv_escape(const std::string& s);

// RFC-4180-ish reader: quoted fields, embedded commas and quotes. Newlines
// inside quoted fields are not supported (none of the consumed formats use
// them). Returns one vector of fields per non-empty line.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

// Joins pre-escaped or raw fields into a row; escapes each field.
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

// Percentage with one decimal place via integer rounding, e.g. 73.5 -> "73.5".
std::string pct_one_decimal(std::uint64_t part, std::uint64_t whole);

} // namespace zana
