#include "wcur/format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

#include "wcur/grid.hpp"

namespace wcur {

std::string format_number(double x, int digits) {
  if (x == 0.0) return "0";  // also folds -0
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, digits);
  return std::string(buf, r.ptr);
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return x;
}

std::optional<long> parse_integer(std::string_view s) {
  long x = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return x;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    const size_t start = k;
    while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

std::vector<double> parse_number_list(std::string_view s) {
  std::vector<double> out;
  while (!s.empty()) {
    const size_t comma = s.find(',');
    const std::string_view tok = s.substr(0, comma);
    auto x = parse_number(tok);
    if (!x) throw ValidationError("not a number: '" + std::string(tok) + "'");
    out.push_back(*x);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace wcur
