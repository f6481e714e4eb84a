#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace btv::detail {

/// One parsed CSV table. Quoted fields and CRLF line endings are accepted.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  /// Column index by name; throws ValidationError when absent.
  std::size_t column(const std::string& name, const std::filesystem::path& origin) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Quotes a field only when it contains a delimiter, quote or newline.
std::string csv_escape(const std::string& field);

}  // namespace btv::detail
