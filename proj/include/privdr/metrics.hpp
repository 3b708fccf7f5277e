#pragma once

#include "privdr/privacy.hpp"
#include "privdr/run_report.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace privdr
{
  /// Root-mean-square of the residual trace.
  double
  tracking_rmse(RunReport const& report);

  double
  max_abs_residual(RunReport const& report);

  /// (building, step) samples outside [lo, hi] by more than comfort_tolerance.
  std::size_t
  comfort_violation_count(RunReport const& report, double lo, double hi);

  inline std::size_t
  comfort_violation_count(RunReport const& report)
  {
    return comfort_violation_count(report, report.comfort_min, report.comfort_max);
  }

  std::size_t
  clamped_step_count(RunReport const& report);

  struct Histogram
  {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;

    double
    width() const { return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size()); }

    double
    center(std::size_t bin) const { return lo + (static_cast<double>(bin) + 0.5) * width(); }
  };

  /// Equal-width bins over [min, max]; the last bin is closed. A constant
  /// series lands entirely in bin 0.
  Histogram
  noise_histogram(std::span<double const> values, std::size_t n_bins);

  /// Fixed range [lo, hi]; samples outside are counted in the edge bins.
  Histogram
  noise_histogram(std::span<double const> values, std::size_t n_bins, double lo, double hi);

  /// Range [-max|x|, max|x|] with an even bin count, so zero is a bin edge.
  Histogram
  zero_centered_histogram(std::span<double const> values, std::size_t n_bins);

  /// |mass left of zero - mass right of zero| / total. A bin straddling
  /// zero is split by overlap.
  double
  histogram_zero_asymmetry(Histogram const& hist);

  struct MomentCheck
  {
    double mean = 0.0;
    double variance = 0.0; // unbiased; NaN when undefined
    bool variance_defined = false;
    double expected_variance = 0.0; // 2 lambda^2
  };

  MomentCheck
  noise_moment_check(std::span<double const> noise, DPParams const& params);

  /// Gap between the realized perturbation PV - aggregate and the intended
  /// noise. divergence = tracking part + clamp part, where tracking part is
  /// -residual and clamp part is net_pv - reference.
  struct Divergence
  {
    std::vector<double> divergence_kw;
    std::vector<double> tracking_kw;
    std::vector<double> clamp_kw;
    double max_abs = 0.0;
    double mean_abs = 0.0;
  };

  Divergence
  residual_vs_intended_noise(RunReport const& report);

  /// Largest |residual| over steps flagged in_envelope; 0 if none.
  double
  max_envelope_error(RunReport const& report);

  std::size_t
  envelope_step_count(RunReport const& report);

  struct RunSummary
  {
    double rmse_kw = 0.0;
    double max_abs_residual_kw = 0.0;
    std::size_t comfort_violations = 0;
    std::size_t clamped_steps = 0;
    std::size_t infeasible_steps = 0;
    std::size_t envelope_steps = 0;
    double max_envelope_error_kw = 0.0;
    MomentCheck noise;
    double max_divergence_kw = 0.0;
    double mean_divergence_kw = 0.0;
  };

  RunSummary
  summarize(RunReport const& report, DPParams const& params);
}
