#pragma once

#include "privdr/metrics.hpp"
#include "privdr/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace privdr::cli
{
  enum class Subcommand
  {
    Noise,
    Simulate,
    Report,
  };

  /// Exit codes of the command-line tool.
  enum ExitCode : int
  {
    ok = 0,
    config_error = 1,
    solver_guard = 2,
    infeasible = 3,
  };

  struct Invocation
  {
    Subcommand subcommand = Subcommand::Simulate;
    std::filesystem::path config_path; // empty: built-in defaults
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::optional<std::string> solver;
    std::optional<std::size_t> horizon;    // closed-loop steps
    std::optional<std::size_t> horizon_np; // prediction steps
    std::size_t bins = 30;
    bool strict = false;
  };

  /// Config file (or defaults) with command-line overrides applied.
  ScenarioConfig
  resolve_config(Invocation const& inv);

  /// Noise trace, histogram, moment check and manifest.
  void
  cmd_noise(Invocation const& inv, std::ostream& log);

  /// Full pipeline. Returns the run summary; throws SolverGuardError when the
  /// exact solver is asked for more binaries than it accepts.
  RunSummary
  cmd_simulate(Invocation const& inv, std::ostream& log);

  /// Recomputes summary and plot data from an existing run directory.
  RunSummary
  cmd_report(Invocation const& inv, std::ostream& log);

  /// Parses argv, runs the subcommand and maps failures onto ExitCode.
  int
  run(int argc, char const* const* argv, std::ostream& out, std::ostream& err);
}
