#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gdivide::csv {

struct Row {
  std::size_t line = 0;  // 1-based line in the source file
  std::vector<std::string> fields;
};

struct Table {
  std::string path;
  std::vector<std::string> header;
  std::vector<Row> rows;
};

/// Reads a comma-separated file with a header line. Fields may be
/// double-quoted ("" escapes a quote). Throws FileError when the file cannot
/// be opened.
Table read(const std::string& path);

/// Throws IntegrityError when the header differs from `expected`.
void require_header(const Table& table, const std::vector<std::string>& expected);

std::vector<std::string> split(std::string_view line, char sep = ',');

// Locale-independent parsers; return nullopt on anything but a full match.
std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<double> parse_double(std::string_view text);

/// Fixed-point with `decimals` digits, dot separator.
std::string fixed(double value, int decimals = 6);
/// Shortest text that round-trips to the same double.
std::string shortest(double value);

/// Writes via a temporary sibling file and rename, so readers never observe a
/// partially written artifact.
void write_atomic(const std::string& path, std::string_view contents);

}  // namespace gdivide::csv
