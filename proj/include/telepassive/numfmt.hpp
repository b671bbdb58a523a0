#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace telepassive {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Whole-string parses; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

}  // namespace telepassive
