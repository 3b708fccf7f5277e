#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace privdr
{
  enum class Unit
  {
    Kilowatt,
    Celsius,
    KilowattPerSquareMeter,
  };

  /// Column-name suffix for a unit: "kw", "c" or "kw_m2".
  std::string_view
  unit_suffix(Unit unit);

  /// Uniformly sampled time series. Index k covers [k, k+1) * step_seconds.
  struct Trace
  {
    std::vector<double> values;
    Unit unit = Unit::Kilowatt;
    int step_seconds = 600;
    std::string start_label;

    std::size_t
    size() const { return values.size(); }
  };

  /// Throws std::invalid_argument when the trace is empty, has a
  /// non-positive step or carries a non-finite sample.
  void
  validate(Trace const& trace);

  /// Writes `time_s,<name>_<unit>` with full round-trip precision.
  void
  write_trace_csv(
    std::filesystem::path const& path,
    Trace const& trace,
    std::string const& name);

  /// Reads a single-series trace file.
  ///
  /// The first column is either `time_s` (spacing must equal expected_step)
  /// or `step` (consecutive integers from 0). The second column header must
  /// end in the suffix of expected_unit. Parse failures name the 1-based
  /// file row. Throws InputError.
  Trace
  load_trace(
    std::filesystem::path const& path,
    Unit expected_unit,
    int expected_step);

  /// Formats a double with 17 significant digits.
  std::string
  format_double(double value);
}
