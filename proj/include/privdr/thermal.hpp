#pragma once

#include "privdr/schedule.hpp"
#include "privdr/trace.hpp"

#include <cstddef>
#include <filesystem>
#include <vector>

namespace privdr
{
  /// First-order building model dq/dt = a q + b u + g_temp T_out + g_solar Q_solar,
  /// rates per hour.
  struct ContinuousThermalModel
  {
    double a = -0.5;       // 1/h
    double b = -6.0;       // degC/h when ON
    double g_temp = 0.5;   // 1/h on outdoor temperature
    double g_solar = 1.0;  // degC/h per kW/m2
    double p_rate = 5.0;   // kW drawn when ON

    /// Stable cooling unit: a < 0, b < 0, p_rate > 0.
    void
    validate_cooling() const;
  };

  struct DiscreteThermalModel
  {
    double a_d = 1.0;
    double b_d = 0.0;
    double g_d_temp = 0.0;
    double g_d_solar = 0.0;
    int dt_seconds = 600;
    double p_rate = 5.0;

    bool
    operator==(DiscreteThermalModel const&) const = default;
  };

  struct BuildingState
  {
    double temp = 23.0; // degC
    int mode = 0;       // 0 = OFF, 1 = ON
  };

  struct Disturbance
  {
    double t_out = 0.0;   // degC
    double q_solar = 0.0; // kW/m2
  };

  struct DisturbanceTrace
  {
    std::vector<double> t_out;
    std::vector<double> q_solar;
    int step_seconds = 600;

    std::size_t
    size() const { return t_out.size(); }

    Disturbance
    at(std::size_t k) const { return {t_out.at(k), q_solar.at(k)}; }

    /// Both series non-empty, equal length and finite.
    void
    validate() const;
  };

  /// Exact zero-order hold of the scalar system over dt_seconds.
  DiscreteThermalModel
  discretize(ContinuousThermalModel const& model, int dt_seconds = 600);

  /// One step of x' = a_d x + b_d u + g_d v. Rejects u outside {0, 1}.
  BuildingState
  step(DiscreteThermalModel const& model, BuildingState const& state, int u, Disturbance const& v);

  /// Temperature only, no validation. Hot loop helper.
  inline double
  next_temp(DiscreteThermalModel const& m, double temp, int u, Disturbance const& v)
  {
    return m.a_d * temp + m.b_d * u + m.g_d_temp * v.t_out + m.g_d_solar * v.q_solar;
  }

  /// Fixed point under constant input and disturbance. Requires |a_d| < 1.
  double
  steady_state_temp(DiscreteThermalModel const& model, int u, Disturbance const& v);

  struct EnsembleTrajectory
  {
    /// temps[j][k] is building j's temperature after applying column k.
    std::vector<std::vector<double>> temps;
    /// Sum of u_j(k) * p_rate_j per column.
    std::vector<double> aggregate_kw;
  };

  EnsembleTrajectory
  simulate_ensemble(
    std::vector<DiscreteThermalModel> const& models,
    std::vector<BuildingState> const& states,
    Schedule const& schedule,
    DisturbanceTrace const& disturbances);

  /// Reads `step,t_out_c,q_solar_kw_m2`. Throws InputError.
  DisturbanceTrace
  load_disturbance_csv(std::filesystem::path const& path, int step_seconds);

  void
  write_disturbance_csv(std::filesystem::path const& path, DisturbanceTrace const& trace);
}
