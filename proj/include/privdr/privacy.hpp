#pragma once

#include "privdr/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace privdr
{
  /// Uniform bit source for all seeded sampling in the project. The 64-bit
  /// Mersenne Twister has a fully specified output sequence, so draws are
  /// identical on every conforming standard library.
  using Rng = std::mt19937_64;

  /// Maps one 64-bit draw onto the open interval (0, 1) using its top 53 bits.
  double
  uniform_open01(Rng& rng);

  struct DPParams
  {
    double epsilon = 0.1;
    double delta = 0.0;
    double sensitivity = 1.0; // kW
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument unless epsilon > 0, sensitivity > 0,
    /// 0 <= delta < 1 and the Laplace scale is finite.
    void
    validate() const;

    /// True when delta > 0. The Laplace mechanism already meets the pure
    /// epsilon bound, so any delta is unused slack.
    bool
    has_delta_slack() const { return delta > 0.0; }
  };

  struct NoiseTrace
  {
    std::vector<double> values; // kW per step
    int step_seconds = 600;

    std::size_t
    size() const { return values.size(); }
  };

  /// lambda = sensitivity / epsilon.
  double
  laplace_scale(DPParams const& params);

  /// Zero-mean Laplace density (1 / 2 lambda) exp(-|x| / lambda).
  double
  laplace_pdf(double x, double scale);

  /// Inverse-CDF transform of a uniform p in (0, 1).
  double
  laplace_from_uniform(double p, double scale);

  double
  sample_laplace(double scale, Rng& rng);

  /// `length` i.i.d. Laplace(sensitivity / epsilon) draws from an Rng seeded
  /// with params.seed.
  NoiseTrace
  generate_noise_trace(DPParams const& params, std::size_t length, int step_seconds = 600);

  /// Elementwise pv - noise. Negative results are kept.
  Trace
  compute_net_pv(Trace const& pv, NoiseTrace const& noise);

  /// Checks pdf(x) / pdf(x - shift) <= exp(epsilon) at the configured scale.
  /// Evaluated in the log domain with a few ulps of slack so the boundary
  /// case |shift| = sensitivity is not lost to rounding.
  bool
  density_ratio_bound_check(DPParams const& params, double x, double shift);

  /// Expected total squared error 2 m sensitivity^2 / epsilon^2 of m
  /// independent Laplace releases.
  double
  mechanism_expected_squared_error(DPParams const& params, std::size_t m);

  /// Writes `step,noise_kw`.
  void
  write_noise_csv(std::filesystem::path const& path, NoiseTrace const& noise);

  NoiseTrace
  load_noise_csv(std::filesystem::path const& path, int step_seconds);
}
