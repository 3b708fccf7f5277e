#include "privdr/trace.hpp"

#include "csv.hpp"
#include "privdr/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace privdr
{
  std::string_view
  unit_suffix(Unit unit)
  {
    switch (unit) {
      case Unit::Kilowatt:
        return "kw";
      case Unit::Celsius:
        return "c";
      case Unit::KilowattPerSquareMeter:
        return "kw_m2";
    }
    return "";
  }

  void
  validate(Trace const& trace)
  {
    if (trace.values.empty()) {
      throw std::invalid_argument{"trace is empty"};
    }
    if (trace.step_seconds <= 0) {
      throw std::invalid_argument{"trace step_seconds must be positive"};
    }
    for (std::size_t k = 0; k < trace.values.size(); ++k) {
      if (!std::isfinite(trace.values[k])) {
        throw std::invalid_argument{
          "trace value at step " + std::to_string(k) + " is not finite"};
      }
    }
  }

  std::string
  format_double(double value)
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
  }

  void
  write_trace_csv(
    std::filesystem::path const& path,
    Trace const& trace,
    std::string const& name)
  {
    std::ofstream out{path};
    if (!out) {
      throw InputError{"cannot write file: " + path.string()};
    }
    out << "time_s," << name << '_' << unit_suffix(trace.unit) << '\n';
    for (std::size_t k = 0; k < trace.values.size(); ++k) {
      out << static_cast<long long>(k) * trace.step_seconds << ','
          << format_double(trace.values[k]) << '\n';
    }
  }

  namespace
  {
    bool
    ends_with_unit(std::string const& column, Unit unit)
    {
      auto const suffix = "_" + std::string{unit_suffix(unit)};
      if (column.size() < suffix.size()) {
        return false;
      }
      return column.compare(column.size() - suffix.size(), suffix.size(), suffix) == 0;
    }
  }

  Trace
  load_trace(
    std::filesystem::path const& path,
    Unit expected_unit,
    int expected_step)
  {
    auto const table = csv::read(path);
    if (table.header.size() < 2) {
      throw InputError{table.source + ": expected two columns (time_s|step, value)"};
    }
    bool const by_time = table.header[0] == "time_s";
    if (!by_time && table.header[0] != "step") {
      throw InputError{table.source + ": first column must be 'time_s' or 'step'"};
    }
    if (!ends_with_unit(table.header[1], expected_unit)) {
      throw InputError{
        table.source + ": unit mismatch, column '" + table.header[1]
        + "' does not end in '_" + std::string{unit_suffix(expected_unit)} + "'"};
    }
    if (table.rows.empty()) {
      throw InputError{table.source + ": no data rows"};
    }

    Trace trace;
    trace.unit = expected_unit;
    trace.step_seconds = expected_step;
    trace.start_label = path.filename().string();
    trace.values.reserve(table.rows.size());

    long long previous = 0;
    for (auto const& row : table.rows) {
      if (row.fields.size() < 2) {
        throw InputError{csv::where(table, row) + ": missing value"};
      }
      auto const stamp = csv::parse_int(row.fields[0], table, row);
      if (row.index > 1) {
        auto const expected_gap = by_time ? expected_step : 1;
        if (stamp - previous != expected_gap) {
          throw InputError{
            csv::where(table, row) + ": gap or step mismatch, expected increment "
            + std::to_string(expected_gap) + " got " + std::to_string(stamp - previous)};
        }
      } else if (!by_time && stamp != 0) {
        throw InputError{csv::where(table, row) + ": step index must start at 0"};
      }
      previous = stamp;
      trace.values.push_back(csv::parse_double(row.fields[1], table, row));
    }
    return trace;
  }
}
