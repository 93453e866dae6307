#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lurk::csv {

/// Splits one CSV record. Supports double-quoted fields with "" escapes.
/// Returns std::nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_record(std::string_view line, char delimiter = ',');

/// Quotes a field if it contains the delimiter, a quote, or a line break.
std::string escape(std::string_view field, char delimiter = ',');

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<double> parse_double(std::string_view text);

} // namespace lurk::csv
