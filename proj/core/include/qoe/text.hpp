#pragma once

// Small text helpers shared by the CSV readers and writers.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qoe::text {

// Splits one CSV record on commas (no quoting; identifiers never contain commas).
// A trailing '\r' is stripped.
std::vector<std::string> split_csv(std::string_view line);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Strict parsers; throw ParseError tagged with `line` on failure.
double parse_double(std::string_view token, std::size_t line);
long long parse_integer(std::string_view token, std::size_t line);

// Empty cell -> nullopt.
std::optional<double> parse_optional_double(std::string_view token, std::size_t line);

}  // namespace qoe::text
