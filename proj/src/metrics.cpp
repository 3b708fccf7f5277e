#include "privdr/metrics.hpp"

#include "privdr/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace privdr
{
  double
  tracking_rmse(RunReport const& report)
  {
    if (report.residual_kw.empty()) {
      throw std::invalid_argument{"report has no steps"};
    }
    double sum = 0.0;
    for (auto r : report.residual_kw) {
      sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(report.residual_kw.size()));
  }

  double
  max_abs_residual(RunReport const& report)
  {
    double m = 0.0;
    for (auto r : report.residual_kw) {
      m = std::max(m, std::abs(r));
    }
    return m;
  }

  std::size_t
  comfort_violation_count(RunReport const& report, double lo, double hi)
  {
    std::size_t n = 0;
    for (auto const& series : report.temps) {
      for (auto t : series) {
        n += band_overshoot(t, lo, hi) > 0.0 ? 1 : 0;
      }
    }
    return n;
  }

  std::size_t
  clamped_step_count(RunReport const& report)
  {
    std::size_t n = 0;
    for (std::size_t k = 0; k < report.n_steps(); ++k) {
      n += report.clamp_kw(k) != 0.0 ? 1 : 0;
    }
    return n;
  }

  Histogram
  noise_histogram(std::span<double const> values, std::size_t n_bins)
  {
    if (values.empty()) {
      return noise_histogram(values, n_bins, 0.0, 0.0);
    }
    auto const [mn, mx] = std::minmax_element(values.begin(), values.end());
    return noise_histogram(values, n_bins, *mn, *mx);
  }

  Histogram
  noise_histogram(std::span<double const> values, std::size_t n_bins, double lo, double hi)
  {
    if (n_bins == 0) {
      throw std::invalid_argument{"histogram needs at least one bin"};
    }
    if (!(lo <= hi)) {
      throw std::invalid_argument{"histogram range is empty"};
    }
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(n_bins, 0);
    auto const span = h.hi - h.lo;
    for (auto x : values) {
      std::size_t bin = 0;
      if (span > 0.0 && x > h.lo) {
        auto const pos = (x - h.lo) / span * static_cast<double>(n_bins);
        bin = std::min(static_cast<std::size_t>(pos), n_bins - 1);
      }
      ++h.counts[bin];
    }
    return h;
  }

  Histogram
  zero_centered_histogram(std::span<double const> values, std::size_t n_bins)
  {
    double reach = 0.0;
    for (auto x : values) {
      reach = std::max(reach, std::abs(x));
    }
    return noise_histogram(values, n_bins + n_bins % 2, -reach, reach);
  }

  double
  histogram_zero_asymmetry(Histogram const& hist)
  {
    double left = 0.0;
    double right = 0.0;
    double total = 0.0;
    auto const w = hist.width();
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
      auto const c = static_cast<double>(hist.counts[b]);
      total += c;
      auto const lo = hist.lo + static_cast<double>(b) * w;
      auto const hi = lo + w;
      if (hi <= 0.0) {
        left += c;
      } else if (lo >= 0.0) {
        right += c;
      } else {
        // straddles zero: split by overlap
        left += c * (-lo / w);
        right += c * (hi / w);
      }
    }
    return total > 0.0 ? std::abs(left - right) / total : 0.0;
  }

  MomentCheck
  noise_moment_check(std::span<double const> noise, DPParams const& params)
  {
    MomentCheck m;
    auto const scale = laplace_scale(params);
    m.expected_variance = 2.0 * scale * scale;
    if (noise.empty()) {
      m.mean = std::numeric_limits<double>::quiet_NaN();
      m.variance = std::numeric_limits<double>::quiet_NaN();
      return m;
    }
    double sum = 0.0;
    for (auto x : noise) {
      sum += x;
    }
    auto const n = static_cast<double>(noise.size());
    m.mean = sum / n;
    if (noise.size() < 2) {
      m.variance = std::numeric_limits<double>::quiet_NaN();
      return m;
    }
    double ss = 0.0;
    for (auto x : noise) {
      ss += (x - m.mean) * (x - m.mean);
    }
    m.variance = ss / (n - 1.0);
    m.variance_defined = true;
    return m;
  }

  Divergence
  residual_vs_intended_noise(RunReport const& report)
  {
    auto const n = report.n_steps();
    if (report.pv_kw.size() != n || report.noise_kw.size() != n) {
      throw std::invalid_argument{"report lacks pv or noise series"};
    }
    Divergence d;
    d.divergence_kw.resize(n);
    d.tracking_kw.resize(n);
    d.clamp_kw.resize(n);
    double sum_abs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      d.divergence_kw[k] = (report.pv_kw[k] - report.aggregate_kw[k]) - report.noise_kw[k];
      d.tracking_kw[k] = -report.residual_kw[k];
      d.clamp_kw[k] = report.net_pv_kw[k] - report.reference_kw[k];
      d.max_abs = std::max(d.max_abs, std::abs(d.divergence_kw[k]));
      sum_abs += std::abs(d.divergence_kw[k]);
    }
    d.mean_abs = n > 0 ? sum_abs / static_cast<double>(n) : 0.0;
    return d;
  }

  double
  max_envelope_error(RunReport const& report)
  {
    double m = 0.0;
    for (std::size_t k = 0; k < report.n_steps(); ++k) {
      if (report.in_envelope[k]) {
        m = std::max(m, std::abs(report.residual_kw[k]));
      }
    }
    return m;
  }

  std::size_t
  envelope_step_count(RunReport const& report)
  {
    return static_cast<std::size_t>(
      std::count(report.in_envelope.begin(), report.in_envelope.end(), std::uint8_t{1}));
  }

  RunSummary
  summarize(RunReport const& report, DPParams const& params)
  {
    RunSummary s;
    s.rmse_kw = tracking_rmse(report);
    s.max_abs_residual_kw = max_abs_residual(report);
    s.comfort_violations = comfort_violation_count(report);
    s.clamped_steps = clamped_step_count(report);
    s.infeasible_steps = static_cast<std::size_t>(std::count_if(
      report.infeasible_units.begin(), report.infeasible_units.end(), [](int n) { return n > 0; }));
    s.envelope_steps = envelope_step_count(report);
    s.max_envelope_error_kw = max_envelope_error(report);
    s.noise = noise_moment_check(report.noise_kw, params);
    auto const d = residual_vs_intended_noise(report);
    s.max_divergence_kw = d.max_abs;
    s.mean_divergence_kw = d.mean_abs;
    return s;
  }
}
