#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wcur {

/// Locale-independent shortest-roundtrip-safe formatting with `digits`
/// significant digits (%g style).
std::string format_number(double x, int digits = 17);

/// Locale-independent parse of a whole token; nullopt on trailing garbage.
std::optional<double> parse_number(std::string_view s);
std::optional<long> parse_integer(std::string_view s);

/// Whitespace-separated tokens of one line.
std::vector<std::string_view> split_ws(std::string_view line);

/// Comma-separated list of reals, e.g. "0.3,0.5,0.7".
std::vector<double> parse_number_list(std::string_view s);

}  // namespace wcur
