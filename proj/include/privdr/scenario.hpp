#pragma once

#include "privdr/dispatch.hpp"
#include "privdr/privacy.hpp"
#include "privdr/thermal.hpp"
#include "privdr/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace privdr
{
  /// Sparse per-building replacement of the default continuous parameters.
  struct BuildingOverride
  {
    std::size_t index = 0;
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> g_temp;
    std::optional<double> g_solar;
    std::optional<double> p_rate;
  };

  struct PvSource
  {
    std::string csv_path; // empty selects the synthetic generator
    double peak_kw = 300.0;
    double cloud_intensity = 0.3;
  };

  struct WeatherSource
  {
    std::string csv_path; // `step,t_out_c,q_solar_kw_m2`; empty selects synthetic
    double mean_c = 28.0;
    double swing_c = 4.0;
    double perturbation_c = 0.2;
  };

  struct ScenarioConfig
  {
    std::uint64_t seed = 2018;
    std::size_t n_buildings = 100;
    std::size_t horizon_steps = 432;
    int step_seconds = 600;
    SolverKind solver = SolverKind::Greedy;

    DPParams dp;
    MPCConfig mpc;

    ContinuousThermalModel building;
    double jitter = 0.0; // relative half-width of uniform parameter jitter
    std::vector<BuildingOverride> overrides;

    PvSource pv;
    WeatherSource weather;

    /// Throws InputError with the offending field name.
    void
    validate() const;
  };

  /// Derived seeds, one stream per consumer, all drawn from the master seed.
  struct SeedPlan
  {
    std::uint64_t noise = 0;
    std::uint64_t clouds = 0;
    std::uint64_t weather = 0;
    std::uint64_t initial_temps = 0;
    std::uint64_t jitter = 0;
  };

  SeedPlan
  derive_seeds(std::uint64_t master);

  /// Parses the YAML configuration text. Absent keys keep their defaults.
  ScenarioConfig
  parse_config(std::string const& yaml_text);

  ScenarioConfig
  load_config(std::filesystem::path const& path);

  /// Canonical YAML rendering of a resolved configuration, stable across runs.
  std::string
  dump_config(ScenarioConfig const& config);

  /// Number of samples in `days` whole days. step_seconds must divide 86400.
  std::size_t
  samples_per_days(int days, int step_seconds);

  /// Half-sine clear-sky shape between 06:00 and 18:00, peak 1 at noon.
  std::vector<double>
  clear_sky_shape(int days, int step_seconds);

  /// Seeded multiplicative cloud factors in [1 - intensity, 1].
  std::vector<double>
  cloud_factors(std::size_t length, double intensity, std::uint64_t seed);

  /// peak_kw * clear_sky_shape * cloud_factors.
  Trace
  synth_pv(int days, int step_seconds, double peak_kw, double cloud_intensity, std::uint64_t seed);

  /// mean_c + swing_c sin(.) peaking at 15:00, plus a smoothed uniform
  /// perturbation bounded by perturbation_c.
  Trace
  synth_weather(
    int days,
    int step_seconds,
    double mean_c,
    double swing_c,
    std::uint64_t seed,
    double perturbation_c = 0.0);

  struct Simulation
  {
    std::vector<ContinuousThermalModel> continuous;
    std::vector<DiscreteThermalModel> models;
    std::vector<BuildingState> init_states;
    DisturbanceTrace disturbances;
    Trace pv;
    SeedPlan seeds;
  };

  Simulation
  build_simulation(ScenarioConfig const& config);
}
