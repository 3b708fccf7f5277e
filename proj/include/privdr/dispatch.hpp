#pragma once

#include "privdr/run_report.hpp"
#include "privdr/schedule.hpp"
#include "privdr/thermal.hpp"
#include "privdr/trace.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace privdr
{
  struct MPCConfig
  {
    std::size_t horizon_np = 6;
    double weight_q = 1.0;
    double weight_r = 10.0;
    double setpoint = 23.0;
    double comfort_min = 22.5;
    double comfort_max = 23.5;

    void
    validate() const;
  };

  /// One receding-horizon subproblem. Index 0 of the forecast and the
  /// reference belongs to the step whose decision is applied next.
  struct DispatchProblem
  {
    std::vector<DiscreteThermalModel> models;
    std::vector<BuildingState> init_states;
    DisturbanceTrace disturbance_forecast;
    std::vector<double> reference; // kW

    std::size_t
    n_buildings() const { return models.size(); }

    /// Throws std::invalid_argument on empty ensembles or traces shorter
    /// than the prediction horizon.
    void
    validate(MPCConfig const& config) const;
  };

  /// Temperatures this far past a comfort bound still count as inside.
  inline constexpr double comfort_tolerance = 1e-9;

  /// Degrees outside [lo, hi] beyond comfort_tolerance, else 0.
  double
  band_overshoot(double temp, double lo, double hi);

  struct Violation
  {
    std::size_t building = 0;
    std::size_t step = 0;
    double overshoot = 0.0; // degC outside the band, always > 0
  };

  /// Predicted consequences of a schedule over the horizon.
  struct Evaluation
  {
    std::vector<double> aggregate_kw;                    // z(k)
    std::vector<std::vector<double>> temps;              // [building][k], after column k
    std::vector<std::vector<double>> error;              // temps - setpoint
    std::vector<Violation> violations;
    double total_violation = 0.0; // sum of overshoots, building-major order
    double cost = 0.0;
  };

  struct DispatchResult
  {
    Schedule schedule;
    std::vector<double> aggregate_kw;
    double cost = 0.0;
    std::vector<std::vector<double>> per_building_error;
    std::vector<Violation> violations;
    /// Units per step whose must-ON and must-OFF rules collided (greedy only).
    std::vector<std::size_t> infeasible_units;
  };

  /// z(k) = sum_j u_j(k) p_rate_j.
  double
  aggregate_power(Schedule const& schedule, std::size_t k, std::vector<double> const& p_rates);

  /// Rolls the schedule through the models and scores it.
  ///
  /// The objective sums, for k = 0..Np-1 in order,
  ///   Q (z(k) - ref(k))^2 + R sum_i (x_i(k+1) - setpoint)^2
  /// with the inner sum over buildings in index order. Both solvers compare
  /// candidates through this function only, so equal schedules score
  /// bit-identically.
  Evaluation
  evaluate(DispatchProblem const& problem, Schedule const& schedule, MPCConfig const& config);

  double
  cost(DispatchProblem const& problem, Schedule const& schedule, MPCConfig const& config);

  /// Largest N_s * N_p the exact solver accepts.
  inline constexpr std::size_t exact_solver_max_binaries = 24;

  /// Depth-first branch-and-bound over the binaries in row-major order,
  /// trying OFF before ON.
  ///
  /// Minimizes (total comfort violation, cost) lexicographically, so a
  /// schedule that keeps every predicted temperature in band always wins
  /// when one exists. Among equal pairs the lexicographically smallest
  /// flattened schedule is kept. Throws SolverGuardError above
  /// exact_solver_max_binaries.
  DispatchResult
  solve_exact(DispatchProblem const& problem, MPCConfig const& config);

  /// Priority dispatch, one step at a time: force units that would leave
  /// the band, then switch ON the warmest free units until the count
  /// closest to the remaining reference is reached.
  DispatchResult
  solve_priority_heuristic(DispatchProblem const& problem, MPCConfig const& config);

  struct ComfortDecision
  {
    int u = 0;
    bool overridden = false;
    /// Both rules fired; the input whose prediction lands nearer the
    /// setpoint was kept.
    bool infeasible = false;
  };

  ComfortDecision
  enforce_comfort(
    DiscreteThermalModel const& model,
    BuildingState const& state,
    Disturbance const& disturbance,
    int candidate_u,
    MPCConfig const& config);

  enum class SolverKind
  {
    Exact,
    Greedy,
  };

  SolverKind
  parse_solver(std::string_view name);

  std::string_view
  solver_name(SolverKind kind);

  /// Closed loop over `steps` steps: solve over the next N_p steps
  /// (truncated at the end), apply the first column after the comfort
  /// override, advance the true states.
  ///
  /// The reference is clamped to [0, sum p_rate] before dispatch; the
  /// report keeps both the raw and clamped series.
  RunReport
  receding_horizon_run(
    std::vector<DiscreteThermalModel> const& models,
    std::vector<BuildingState> const& init_states,
    DisturbanceTrace const& disturbances,
    Trace const& reference,
    MPCConfig const& config,
    SolverKind solver,
    std::size_t steps);
}
