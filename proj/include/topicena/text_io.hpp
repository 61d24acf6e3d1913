#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace topicena::io {

/// One parsed CSV record and the 1-based line on which it starts.
struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// RFC 4180 reader: quoted fields may contain separators, newlines and
/// doubled quotes. A trailing '\r' before '\n' is dropped. Throws ParseError
/// on an unterminated quote.
std::vector<CsvRecord> parse_csv(std::string_view text);

/// Quotes a field only when it contains ',', '"', '\n' or '\r'.
std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
/// Fixed-point form with `decimals` digits; used for SVG coordinates.
std::string format_fixed(double value, int decimals);

/// Strict full-string numeric parses; throw ParseError (with `line`) on junk.
double parse_double(std::string_view text, std::size_t line);
long long parse_int(std::string_view text, std::size_t line);

std::string_view trim(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames into place.
void write_file(const std::filesystem::path& path, std::string_view content);

/// FNV-1a 64-bit digest, hex encoded. Used to fingerprint run inputs.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace topicena::io
