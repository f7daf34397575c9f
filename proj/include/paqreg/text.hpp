#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace paqreg::text {

std::string trim(std::string_view s);
bool is_blank(std::string_view s);
void strip_cr(std::string& s);

/// Parses a decimal number. Empty or "nan" (any case) yields NaN; anything
/// that is not a complete number yields nullopt.
std::optional<double> parse_number(std::string_view s);
/// Shortest round-trip representation; NaN prints as "nan".
std::string format_number(double v);
/// Quotes a CSV field only when it needs it.
std::string csv_quote(std::string_view s);

}  // namespace paqreg::text
