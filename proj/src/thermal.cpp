#include "privdr/thermal.hpp"

#include "csv.hpp"
#include "privdr/error.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace privdr
{
  void
  ContinuousThermalModel::validate_cooling() const
  {
    if (!(a < 0.0)) {
      throw std::invalid_argument{"thermal model needs a < 0 (stable decay)"};
    }
    if (!(b < 0.0)) {
      throw std::invalid_argument{"cooling model needs b < 0"};
    }
    if (!(p_rate > 0.0)) {
      throw std::invalid_argument{"p_rate must be positive"};
    }
  }

  void
  DisturbanceTrace::validate() const
  {
    if (t_out.empty()) {
      throw std::invalid_argument{"disturbance trace is empty"};
    }
    if (t_out.size() != q_solar.size()) {
      throw std::invalid_argument{"disturbance series lengths differ"};
    }
    if (step_seconds <= 0) {
      throw std::invalid_argument{"disturbance step_seconds must be positive"};
    }
    for (std::size_t k = 0; k < t_out.size(); ++k) {
      if (!std::isfinite(t_out[k]) || !std::isfinite(q_solar[k])) {
        throw std::invalid_argument{
          "disturbance value at step " + std::to_string(k) + " is not finite"};
      }
    }
  }

  DiscreteThermalModel
  discretize(ContinuousThermalModel const& model, int dt_seconds)
  {
    if (dt_seconds <= 0) {
      throw std::invalid_argument{"dt_seconds must be positive"};
    }
    auto const dt_hours = dt_seconds / 3600.0;
    auto const x = model.a * dt_hours;
    // (e^{a dt} - 1) / a, written through expm1 so small a dt keeps precision
    auto const gain = (x == 0.0) ? dt_hours : std::expm1(x) / model.a;

    DiscreteThermalModel d;
    d.a_d = std::exp(x);
    d.b_d = gain * model.b;
    d.g_d_temp = gain * model.g_temp;
    d.g_d_solar = gain * model.g_solar;
    d.dt_seconds = dt_seconds;
    d.p_rate = model.p_rate;
    return d;
  }

  BuildingState
  step(DiscreteThermalModel const& model, BuildingState const& state, int u, Disturbance const& v)
  {
    if (u != 0 && u != 1) {
      throw std::invalid_argument{"HVAC input must be 0 or 1"};
    }
    return BuildingState{next_temp(model, state.temp, u, v), u};
  }

  double
  steady_state_temp(DiscreteThermalModel const& model, int u, Disturbance const& v)
  {
    if (!(std::abs(model.a_d) < 1.0)) {
      throw std::invalid_argument{"steady state needs |a_d| < 1"};
    }
    return (model.b_d * u + model.g_d_temp * v.t_out + model.g_d_solar * v.q_solar)
      / (1.0 - model.a_d);
  }

  EnsembleTrajectory
  simulate_ensemble(
    std::vector<DiscreteThermalModel> const& models,
    std::vector<BuildingState> const& states,
    Schedule const& schedule,
    DisturbanceTrace const& disturbances)
  {
    auto const n = models.size();
    if (states.size() != n || schedule.n_buildings != n) {
      throw std::invalid_argument{"ensemble size mismatch between models, states and schedule"};
    }
    if (disturbances.size() < schedule.n_steps || disturbances.q_solar.size() < schedule.n_steps) {
      throw std::invalid_argument{"disturbance trace shorter than schedule"};
    }

    EnsembleTrajectory out;
    out.temps.assign(n, std::vector<double>(schedule.n_steps));
    out.aggregate_kw.assign(schedule.n_steps, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      auto state = states[j];
      for (std::size_t k = 0; k < schedule.n_steps; ++k) {
        auto const u = schedule.at(j, k);
        state = step(models[j], state, u, disturbances.at(k));
        out.temps[j][k] = state.temp;
      }
    }
    for (std::size_t k = 0; k < schedule.n_steps; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        out.aggregate_kw[k] += schedule.at(j, k) * models[j].p_rate;
      }
    }
    return out;
  }

  DisturbanceTrace
  load_disturbance_csv(std::filesystem::path const& path, int step_seconds)
  {
    auto const table = csv::read(path);
    auto const c_step = table.column("step");
    auto const c_temp = table.column("t_out_c");
    auto const c_solar = table.column("q_solar_kw_m2");
    if (table.rows.empty()) {
      throw InputError{table.source + ": no data rows"};
    }
    DisturbanceTrace trace;
    trace.step_seconds = step_seconds;
    for (auto const& row : table.rows) {
      if (row.fields.size() < table.header.size()) {
        throw InputError{csv::where(table, row) + ": missing field"};
      }
      auto const k = csv::parse_int(row.fields[c_step], table, row);
      if (k != static_cast<long long>(trace.t_out.size())) {
        throw InputError{
          csv::where(table, row) + ": expected step " + std::to_string(trace.t_out.size())
          + " got " + std::to_string(k)};
      }
      trace.t_out.push_back(csv::parse_double(row.fields[c_temp], table, row));
      trace.q_solar.push_back(csv::parse_double(row.fields[c_solar], table, row));
    }
    return trace;
  }

  void
  write_disturbance_csv(std::filesystem::path const& path, DisturbanceTrace const& trace)
  {
    std::ofstream out{path};
    if (!out) {
      throw InputError{"cannot write file: " + path.string()};
    }
    out << "step,t_out_c,q_solar_kw_m2\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
      out << k << ',' << format_double(trace.t_out[k]) << ','
          << format_double(trace.q_solar[k]) << '\n';
    }
  }
}
