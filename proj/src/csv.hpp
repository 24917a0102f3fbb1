#pragma once

// RFC-4180 style delimited text: quoted fields may hold delimiters, doubled
// quotes and line breaks. Internal to the library.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace simcmp::detail {

struct CsvRow {
  std::size_t line = 0;  // 1-based physical line where the row starts
  std::vector<std::string> fields;
};

/// Splits `text` into rows. Empty physical lines are skipped. Throws
/// FormatError on an unterminated quoted field.
std::vector<CsvRow> parse_delimited(std::string_view text, char delimiter);

/// Quotes a field when it contains the delimiter, a quote or a line break.
std::string escape_field(std::string_view field, char delimiter = ',');

std::string read_file(const std::string& path);

/// Strict decimal parse of a whole field (surrounding blanks allowed).
bool parse_double(std::string_view text, double& out);

std::string_view trim(std::string_view text);

}  // namespace simcmp::detail
