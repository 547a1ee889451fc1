#include "qoe/text.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "qoe/error.hpp"

namespace qoe::text {

std::vector<std::string> split_csv(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (token.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ParseError("not a finite number: '" + std::string(token) + "'", line);
  return v;
}

long long parse_integer(std::string_view token, std::size_t line) {
  long long v = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (token.empty() || ec != std::errc{} || ptr != end)
    throw ParseError("not an integer: '" + std::string(token) + "'", line);
  return v;
}

std::optional<double> parse_optional_double(std::string_view token, std::size_t line) {
  if (token.empty()) return std::nullopt;
  return parse_double(token, line);
}

}  // namespace qoe::text
