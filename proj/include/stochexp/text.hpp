#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stochexp {

// Shortest decimal form that round-trips to the same double.
std::string format_real(double x);

// Parses a full string as a double; throws std::invalid_argument naming `what`.
double parse_real(std::string_view text, std::string_view what);

std::vector<std::string> split(std::string_view text, char sep);

std::string_view trim(std::string_view text);

}  // namespace stochexp
