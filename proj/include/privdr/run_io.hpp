#pragma once

#include "privdr/metrics.hpp"
#include "privdr/run_report.hpp"
#include "privdr/scenario.hpp"

#include <filesystem>

namespace privdr
{
  /// Files making up a run directory.
  namespace run_files
  {
    inline constexpr char const* manifest = "manifest.yaml";
    inline constexpr char const* noise = "noise.csv";
    inline constexpr char const* dispatch = "dispatch.csv";
    inline constexpr char const* traces = "traces.csv";
    inline constexpr char const* temperatures = "temperatures.csv";
    inline constexpr char const* initial_temps = "initial_temps.csv";
    inline constexpr char const* summary = "summary.csv";
    inline constexpr char const* histogram = "noise_histogram.csv";
    inline constexpr char const* moments = "noise_moments.csv";
    inline constexpr char const* plot_dir = "plots";
  }

  /// Resolved configuration plus the values derived from it at run time.
  struct Manifest
  {
    ScenarioConfig config;
    DPParams dp; // seed resolved from the master seed
    double max_p_rate_kw = 0.0;
  };

  void
  write_manifest(std::filesystem::path const& path, Manifest const& manifest);

  Manifest
  read_manifest(std::filesystem::path const& path);

  /// Per-step CSVs for a finished run: dispatch, traces, temperatures,
  /// initial temperatures and the noise trace.
  void
  write_run_detail(std::filesystem::path const& dir, RunReport const& report);

  /// Rebuilds a RunReport from the per-step CSVs. Missing files are named
  /// in the InputError.
  RunReport
  read_run_detail(std::filesystem::path const& dir, Manifest const& manifest);

  /// One header line and one data row.
  void
  write_summary_csv(std::filesystem::path const& path, RunSummary const& summary);

  void
  write_histogram_csv(std::filesystem::path const& path, Histogram const& hist);

  void
  write_moments_csv(std::filesystem::path const& path, MomentCheck const& moments, double scale);

  /// x,y data files for the noise trace, its histogram, the net reference,
  /// the temperature band and the tracking overlay.
  void
  write_plot_data(std::filesystem::path const& dir, RunReport const& report, std::size_t n_bins);
}
