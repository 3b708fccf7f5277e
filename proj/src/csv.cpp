#include "csv.hpp"

#include "privdr/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace privdr::csv
{
  namespace
  {
    std::string
    trim(std::string_view s)
    {
      auto const first = s.find_first_not_of(" \t\r");
      if (first == std::string_view::npos) {
        return {};
      }
      auto const last = s.find_last_not_of(" \t\r");
      return std::string{s.substr(first, last - first + 1)};
    }

    std::vector<std::string>
    split(std::string const& line)
    {
      std::vector<std::string> out;
      std::string field;
      std::istringstream in{line};
      while (std::getline(in, field, ',')) {
        out.push_back(trim(field));
      }
      if (!line.empty() && line.back() == ',') {
        out.emplace_back();
      }
      return out;
    }
  }

  std::size_t
  Table::column(std::string_view name) const
  {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) {
        return i;
      }
    }
    throw InputError{source + ": missing column '" + std::string{name} + "'"};
  }

  Table
  read(std::filesystem::path const& path)
  {
    std::ifstream in{path};
    if (!in) {
      throw InputError{"cannot open file: " + path.string()};
    }
    Table table;
    table.source = path.string();
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty() || line.front() == '#') {
        continue;
      }
      if (!have_header) {
        table.header = split(line);
        have_header = true;
        continue;
      }
      table.rows.push_back(Row{line_no, table.rows.size() + 1, split(line)});
    }
    if (!have_header) {
      throw InputError{table.source + ": empty file"};
    }
    return table;
  }

  std::string
  where(Table const& table, Row const& row)
  {
    return table.source + ": data row " + std::to_string(row.index)
      + " (line " + std::to_string(row.line) + ")";
  }

  double
  parse_double(std::string_view text, Table const& table, Row const& row)
  {
    double value = 0.0;
    auto const* end = text.data() + text.size();
    auto const [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
      throw InputError{
        where(table, row) + ": cannot parse number '" + std::string{text} + "'"};
    }
    if (!std::isfinite(value)) {
      throw InputError{
        where(table, row) + ": non-finite value '" + std::string{text} + "'"};
    }
    return value;
  }

  long long
  parse_int(std::string_view text, Table const& table, Row const& row)
  {
    long long value = 0;
    auto const* end = text.data() + text.size();
    auto const [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
      throw InputError{
        where(table, row) + ": cannot parse integer '" + std::string{text} + "'"};
    }
    return value;
  }
}
