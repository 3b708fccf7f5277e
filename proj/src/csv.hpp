#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace privdr::csv
{
  struct Row
  {
    std::size_t line = 0;  // 1-based line number in the file
    std::size_t index = 0; // 1-based data row, header excluded
    std::vector<std::string> fields;
  };

  struct Table
  {
    std::vector<std::string> header;
    std::vector<Row> rows;

    /// Column index by name; throws InputError naming the file if absent.
    std::size_t
    column(std::string_view name) const;

    std::string source;
  };

  /// Reads a comma-separated file with a header line. Blank lines are
  /// skipped. Throws InputError if the file is missing or has no header.
  Table
  read(std::filesystem::path const& path);

  /// Strict finite double parse; throws InputError naming the line.
  double
  parse_double(std::string_view text, Table const& table, Row const& row);

  /// "<file>: data row N (line L)" prefix for error messages.
  std::string
  where(Table const& table, Row const& row);

  long long
  parse_int(std::string_view text, Table const& table, Row const& row);
}
