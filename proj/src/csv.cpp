#include "csv.hpp"

#include <fstream>
#include <sstream>

#include "btv/error.hpp"

namespace btv::detail {

namespace {

std::vector<std::string> split_record(const std::string& text, std::size_t& pos, std::size_t& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      ++pos;
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // dropped; \n terminates
    } else if (c == '\n') {
      ++pos;
      ++line;
      fields.push_back(std::move(field));
      return fields;
    } else {
      field.push_back(c);
    }
    ++pos;
  }
  if (quoted) throw ValidationError("unterminated quoted field before line " + std::to_string(line));
  fields.push_back(std::move(field));
  return fields;
}

bool blank(const std::vector<std::string>& record) {
  return record.size() == 1 && record[0].empty();
}

}  // namespace

std::size_t CsvTable::column(const std::string& name, const std::filesystem::path& origin) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError(origin.string() + ": missing column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);

  CsvTable table;
  std::size_t pos = 0;
  std::size_t line = 1;
  bool have_header = false;
  while (pos < text.size()) {
    const std::size_t start_line = line;
    auto record = split_record(text, pos, line);
    if (blank(record)) continue;
    if (!have_header) {
      table.header = std::move(record);
      have_header = true;
      continue;
    }
    if (record.size() != table.header.size()) {
      throw ValidationError(path.string() + ":" + std::to_string(start_line) + ": expected " +
                            std::to_string(table.header.size()) + " fields, found " +
                            std::to_string(record.size()));
    }
    table.rows.push_back(std::move(record));
    table.line_numbers.push_back(start_line);
  }
  if (!have_header) throw ValidationError(path.string() + ": missing header row");
  return table;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace btv::detail
