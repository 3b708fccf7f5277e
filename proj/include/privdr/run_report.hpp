#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace privdr
{
  /// Closed-loop record. Every per-step series has length n_steps();
  /// temps holds one such series per building.
  struct RunReport
  {
    int step_seconds = 600;
    double comfort_min = 22.5;
    double comfort_max = 23.5;
    double max_p_rate = 0.0; // kW

    std::vector<double> pv_kw;
    std::vector<double> noise_kw;
    std::vector<double> net_pv_kw;     // pv - noise, unclamped
    std::vector<double> reference_kw;  // net_pv clamped to the fleet capacity
    std::vector<double> aggregate_kw;  // z(k)
    std::vector<double> residual_kw;   // aggregate - reference
    std::vector<int> n_on;
    std::vector<int> violations;       // buildings out of band after step k
    std::vector<int> infeasible_units; // simultaneous must-ON/must-OFF
    std::vector<std::uint8_t> in_envelope;
    std::vector<double> t_out;
    std::vector<double> q_solar;

    std::vector<double> initial_temps;
    std::vector<std::vector<double>> temps; // [building][k], after step k

    std::size_t
    n_steps() const { return reference_kw.size(); }

    std::size_t
    n_buildings() const { return temps.size(); }

    /// reference_kw - net_pv_kw; nonzero only on clamped steps.
    double
    clamp_kw(std::size_t k) const { return reference_kw[k] - net_pv_kw[k]; }
  };
}
