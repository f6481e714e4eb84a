#include "btv/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace btv {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string{};
}

namespace {
bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}
}  // namespace

bool label_less(const std::string& a, const std::string& b) {
  const bool da = all_digits(a);
  const bool db = all_digits(b);
  if (da && db) {
    const auto ta = a.find_first_not_of('0');
    const auto tb = b.find_first_not_of('0');
    const std::string na = ta == std::string::npos ? "" : a.substr(ta);
    const std::string nb = tb == std::string::npos ? "" : b.substr(tb);
    if (na.size() != nb.size()) return na.size() < nb.size();
    if (na != nb) return na < nb;
    return a < b;
  }
  if (da != db) return da;
  return a < b;
}

}  // namespace btv
