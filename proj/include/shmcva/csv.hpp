#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shmcva::csv {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Text for value * 10^shift, produced by moving the decimal point of the
/// shortest representation of `value`. parse_scaled(format_scaled(v, s), s)
/// returns v bit-for-bit.
std::string format_scaled(double value, int shift);

/// Parses decimal text and divides it by 10^shift without an intermediate
/// binary rounding step. Returns nullopt on malformed input.
std::optional<double> parse_scaled(std::string_view text, int shift = 0);

struct Table {
    std::string label;
    std::filesystem::path path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers; // 1-based line of each row in the file
};

/// Reads a comma-separated file with a mandatory header row that must equal
/// `expected_header`. Blank lines are skipped; every row must have the same
/// number of fields as the header. Throws Error(MissingFile|SchemaViolation).
Table read(const std::filesystem::path& path, const std::vector<std::string>& expected_header,
           std::string_view label);

/// Number in row `row`, column `col`, scaled down by 10^shift. Throws
/// SchemaViolation naming the file and line when the field is not a number.
double number(const Table& table, std::size_t row, std::size_t col, int shift = 0);

void write(const std::filesystem::path& path, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows);

} // namespace shmcva::csv
