#pragma once

// Small locale-independent helpers shared by the CSV and config readers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace respg::text {

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char sep);

std::optional<double> parse_double(std::string_view s) noexcept;
std::optional<long long> parse_int(std::string_view s) noexcept;

// Fixed-point with `decimals` digits after the point.
std::string fixed(double v, int decimals);
// Shortest representation that round-trips, or `digits` significant digits
// in scientific/general form when digits > 0.
std::string general(double v, int digits = 0);

}  // namespace respg::text
