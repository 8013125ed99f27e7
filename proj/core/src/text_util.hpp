#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fatigue::text_util {

std::vector<std::string_view> split(std::string_view s, char sep);

bool valid_utf8(std::string_view s) noexcept;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace fatigue::text_util
