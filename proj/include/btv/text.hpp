#pragma once

#include <optional>
#include <string>

namespace btv {

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double value);

/// Empty string for a null value.
std::string format_optional(const std::optional<double>& value);

/// Natural order for part labels: numeric labels compare as numbers and sort
/// before non-numeric labels, which compare lexicographically.
bool label_less(const std::string& a, const std::string& b);

}  // namespace btv
