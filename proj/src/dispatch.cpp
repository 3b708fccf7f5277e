#include "privdr/dispatch.hpp"

#include "privdr/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace privdr
{
  void
  MPCConfig::validate() const
  {
    if (horizon_np == 0) {
      throw std::invalid_argument{"prediction horizon must be at least 1"};
    }
    if (!(weight_q >= 0.0) || !(weight_r >= 0.0)) {
      throw std::invalid_argument{"weights must be nonnegative"};
    }
    if (!(comfort_min < comfort_max)) {
      throw std::invalid_argument{"comfort_min must be below comfort_max"};
    }
    if (setpoint < comfort_min || setpoint > comfort_max) {
      throw std::invalid_argument{"setpoint must lie inside the comfort band"};
    }
  }

  void
  DispatchProblem::validate(MPCConfig const& config) const
  {
    config.validate();
    if (models.empty()) {
      throw std::invalid_argument{"dispatch problem needs at least one building"};
    }
    if (init_states.size() != models.size()) {
      throw std::invalid_argument{"one initial state per building required"};
    }
    auto const np = config.horizon_np;
    if (disturbance_forecast.t_out.size() < np || disturbance_forecast.q_solar.size() < np) {
      throw std::invalid_argument{"disturbance forecast shorter than the prediction horizon"};
    }
    if (reference.size() < np) {
      throw std::invalid_argument{"reference shorter than the prediction horizon"};
    }
  }

  double
  band_overshoot(double temp, double lo, double hi)
  {
    if (temp > hi + comfort_tolerance) {
      return temp - hi;
    }
    if (temp < lo - comfort_tolerance) {
      return lo - temp;
    }
    return 0.0;
  }

  double
  aggregate_power(Schedule const& schedule, std::size_t k, std::vector<double> const& p_rates)
  {
    if (k >= schedule.n_steps) {
      throw std::out_of_range{"step index beyond the schedule horizon"};
    }
    if (p_rates.size() != schedule.n_buildings) {
      throw std::invalid_argument{"one p_rate per building required"};
    }
    double z = 0.0;
    for (std::size_t j = 0; j < schedule.n_buildings; ++j) {
      z += schedule.at(j, k) * p_rates[j];
    }
    return z;
  }

  Evaluation
  evaluate(DispatchProblem const& problem, Schedule const& schedule, MPCConfig const& config)
  {
    problem.validate(config);
    auto const ns = problem.n_buildings();
    auto const np = config.horizon_np;
    if (schedule.n_buildings != ns || schedule.n_steps != np) {
      throw std::invalid_argument{"schedule dimensions do not match the problem"};
    }

    Evaluation ev;
    ev.temps.assign(ns, std::vector<double>(np));
    ev.error.assign(ns, std::vector<double>(np));
    for (std::size_t i = 0; i < ns; ++i) {
      auto temp = problem.init_states[i].temp;
      for (std::size_t k = 0; k < np; ++k) {
        temp = next_temp(problem.models[i], temp, schedule.at(i, k),
                         problem.disturbance_forecast.at(k));
        ev.temps[i][k] = temp;
        ev.error[i][k] = temp - config.setpoint;
        auto const over = band_overshoot(temp, config.comfort_min, config.comfort_max);
        if (over > 0.0) {
          ev.violations.push_back({i, k, over});
          ev.total_violation += over;
        }
      }
    }

    ev.aggregate_kw.assign(np, 0.0);
    for (std::size_t k = 0; k < np; ++k) {
      double z = 0.0;
      for (std::size_t j = 0; j < ns; ++j) {
        z += schedule.at(j, k) * problem.models[j].p_rate;
      }
      ev.aggregate_kw[k] = z;
    }

    double j_cost = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      auto const dz = ev.aggregate_kw[k] - problem.reference[k];
      double sum_e2 = 0.0;
      for (std::size_t i = 0; i < ns; ++i) {
        sum_e2 += ev.error[i][k] * ev.error[i][k];
      }
      j_cost += config.weight_q * dz * dz + config.weight_r * sum_e2;
    }
    ev.cost = j_cost;
    return ev;
  }

  double
  cost(DispatchProblem const& problem, Schedule const& schedule, MPCConfig const& config)
  {
    return evaluate(problem, schedule, config).cost;
  }

  namespace
  {
    enum class Rule
    {
      Free,
      MustOn,
      MustOff,
    };

    struct Classified
    {
      Rule rule = Rule::Free;
      bool infeasible = false;
    };

    Classified
    classify(DiscreteThermalModel const& model, double temp, Disturbance const& v, MPCConfig const& config)
    {
      auto const off = next_temp(model, temp, 0, v);
      auto const on = next_temp(model, temp, 1, v);
      bool const must_on = off > config.comfort_max + comfort_tolerance;
      bool const must_off = on < config.comfort_min - comfort_tolerance;
      if (must_on && must_off) {
        auto const keep_on = std::abs(on - config.setpoint) <= std::abs(off - config.setpoint);
        return {keep_on ? Rule::MustOn : Rule::MustOff, true};
      }
      if (must_on) {
        return {Rule::MustOn, false};
      }
      if (must_off) {
        return {Rule::MustOff, false};
      }
      return {};
    }

    DispatchResult
    to_result(DispatchProblem const& problem, Schedule schedule, MPCConfig const& config)
    {
      auto ev = evaluate(problem, schedule, config);
      DispatchResult r;
      r.schedule = std::move(schedule);
      r.aggregate_kw = std::move(ev.aggregate_kw);
      r.cost = ev.cost;
      r.per_building_error = std::move(ev.error);
      r.violations = std::move(ev.violations);
      r.infeasible_units.assign(config.horizon_np, 0);
      return r;
    }

    class BranchAndBound
    {
    public:
      BranchAndBound(DispatchProblem const& problem, MPCConfig const& config)
        : problem_{problem},
          config_{config},
          ns_{problem.n_buildings()},
          np_{config.horizon_np},
          current_{ns_, np_},
          path_(np_ + 1, 0.0),
          z_partial_(np_, 0.0),
          suffix_capacity_(ns_ + 1, 0.0)
      {
        for (std::size_t i = ns_; i-- > 0;) {
          suffix_capacity_[i] = suffix_capacity_[i + 1] + problem.models[i].p_rate;
        }
      }

      Schedule
      solve(Schedule const& seed)
      {
        offer(seed);
        descend(0, 0, 0.0, 0.0);
        return best_;
      }

    private:
      // Replaces the incumbent if the candidate scores better, or equal and
      // lexicographically smaller.
      void
      offer(Schedule const& candidate)
      {
        auto const ev = evaluate(problem_, candidate, config_);
        bool take = !have_best_;
        if (!take) {
          if (ev.total_violation != best_violation_) {
            take = ev.total_violation < best_violation_;
          } else if (ev.cost != best_cost_) {
            take = ev.cost < best_cost_;
          } else {
            take = candidate.u < best_.u;
          }
        }
        if (take) {
          best_ = candidate;
          best_violation_ = ev.total_violation;
          best_cost_ = ev.cost;
          have_best_ = true;
        }
      }

      double
      lower_bound(std::size_t building, std::size_t k, double comfort) const
      {
        // Undecided capacity: every later building, plus this building from step k on.
        auto const later = suffix_capacity_[building + 1];
        auto const own = problem_.models[building].p_rate;
        double bound = comfort;
        for (std::size_t t = 0; t < np_; ++t) {
          auto const lo = z_partial_[t];
          auto const hi = lo + later + (t >= k ? own : 0.0);
          auto const ref = problem_.reference[t];
          double gap = 0.0;
          if (ref < lo) {
            gap = lo - ref;
          } else if (ref > hi) {
            gap = ref - hi;
          }
          bound += config_.weight_q * gap * gap;
        }
        return bound;
      }

      bool
      prunable(double violation, double bound) const
      {
        if (violation > best_violation_) {
          return true;
        }
        if (violation < best_violation_) {
          return false;
        }
        // Margin keeps rounding in the bound from cutting an equal-cost leaf.
        return bound > best_cost_ * (1.0 + 1e-9) + 1e-9;
      }

      void
      descend(std::size_t building, std::size_t k, double violation, double comfort)
      {
        if (building == ns_) {
          offer(current_);
          return;
        }
        if (k == 0) {
          path_[0] = problem_.init_states[building].temp;
        }
        auto const& model = problem_.models[building];
        auto const v = problem_.disturbance_forecast.at(k);
        // deeper buildings reuse path_, so keep this entry
        auto const start = path_[k];
        for (int u = 0; u <= 1; ++u) {
          auto const temp = next_temp(model, start, u, v);
          auto const over = band_overshoot(temp, config_.comfort_min, config_.comfort_max);
          auto const e = temp - config_.setpoint;
          auto const next_violation = over > 0.0 ? violation + over : violation;
          auto const next_comfort = comfort + config_.weight_r * e * e;

          current_.set(building, k, u);
          z_partial_[k] += u * model.p_rate;
          path_[k + 1] = temp;

          auto const last_step = k + 1 == np_;
          auto const nb = last_step ? building + 1 : building;
          auto const nk = last_step ? 0 : k + 1;
          double bound = 0.0;
          if (nb < ns_) {
            bound = lower_bound(nb, nk, next_comfort);
          } else {
            bound = lower_bound_complete(next_comfort);
          }
          if (!prunable(next_violation, bound)) {
            descend(nb, nk, next_violation, next_comfort);
          }

          z_partial_[k] -= u * model.p_rate;
        }
        current_.set(building, k, 0);
      }

      double
      lower_bound_complete(double comfort) const
      {
        double bound = comfort;
        for (std::size_t t = 0; t < np_; ++t) {
          auto const dz = z_partial_[t] - problem_.reference[t];
          bound += config_.weight_q * dz * dz;
        }
        return bound;
      }

      DispatchProblem const& problem_;
      MPCConfig const& config_;
      std::size_t ns_;
      std::size_t np_;
      Schedule current_;
      std::vector<double> path_;
      std::vector<double> z_partial_;
      std::vector<double> suffix_capacity_;

      Schedule best_;
      double best_violation_ = std::numeric_limits<double>::infinity();
      double best_cost_ = std::numeric_limits<double>::infinity();
      bool have_best_ = false;
    };
  }

  DispatchResult
  solve_exact(DispatchProblem const& problem, MPCConfig const& config)
  {
    problem.validate(config);
    auto const binaries = problem.n_buildings() * config.horizon_np;
    if (binaries > exact_solver_max_binaries) {
      throw SolverGuardError{
        "exact solver limited to N_s*N_p <= " + std::to_string(exact_solver_max_binaries)
        + " binaries (got " + std::to_string(binaries) + "); use the greedy solver"};
    }
    auto const seed = solve_priority_heuristic(problem, config).schedule;
    BranchAndBound bnb{problem, config};
    return to_result(problem, bnb.solve(seed), config);
  }

  DispatchResult
  solve_priority_heuristic(DispatchProblem const& problem, MPCConfig const& config)
  {
    problem.validate(config);
    auto const ns = problem.n_buildings();
    auto const np = config.horizon_np;

    Schedule schedule{ns, np};
    std::vector<double> temps(ns);
    for (std::size_t j = 0; j < ns; ++j) {
      temps[j] = problem.init_states[j].temp;
    }
    std::vector<std::size_t> infeasible(np, 0);
    std::vector<std::size_t> free_units;
    free_units.reserve(ns);

    for (std::size_t k = 0; k < np; ++k) {
      auto const v = problem.disturbance_forecast.at(k);
      free_units.clear();
      double forced_kw = 0.0;
      double free_kw = 0.0;
      for (std::size_t j = 0; j < ns; ++j) {
        auto const c = classify(problem.models[j], temps[j], v, config);
        infeasible[k] += c.infeasible ? 1 : 0;
        if (c.rule == Rule::MustOn) {
          schedule.set(j, k, 1);
          forced_kw += problem.models[j].p_rate;
        } else if (c.rule == Rule::Free) {
          free_units.push_back(j);
          free_kw += problem.models[j].p_rate;
        }
      }

      if (!free_units.empty()) {
        // Homogeneous fleets divide by the exact rating; mixed fleets use the mean.
        auto const unit_kw = free_kw / static_cast<double>(free_units.size());
        auto const raw = std::round((problem.reference[k] - forced_kw) / unit_kw);
        auto const target = static_cast<std::size_t>(
          std::clamp(raw, 0.0, static_cast<double>(free_units.size())));

        std::stable_sort(free_units.begin(), free_units.end(),
          [&](std::size_t a, std::size_t b) { return temps[a] > temps[b]; });
        for (std::size_t n = 0; n < target; ++n) {
          schedule.set(free_units[n], k, 1);
        }
      }

      for (std::size_t j = 0; j < ns; ++j) {
        temps[j] = next_temp(problem.models[j], temps[j], schedule.at(j, k), v);
      }
    }

    auto result = to_result(problem, std::move(schedule), config);
    result.infeasible_units = std::move(infeasible);
    return result;
  }

  ComfortDecision
  enforce_comfort(
    DiscreteThermalModel const& model,
    BuildingState const& state,
    Disturbance const& disturbance,
    int candidate_u,
    MPCConfig const& config)
  {
    if (candidate_u != 0 && candidate_u != 1) {
      throw std::invalid_argument{"candidate input must be 0 or 1"};
    }
    auto const c = classify(model, state.temp, disturbance, config);
    ComfortDecision d;
    d.u = candidate_u;
    if (c.rule == Rule::MustOn) {
      d.u = 1;
    } else if (c.rule == Rule::MustOff) {
      d.u = 0;
    }
    d.overridden = d.u != candidate_u;
    d.infeasible = c.infeasible;
    return d;
  }

  SolverKind
  parse_solver(std::string_view name)
  {
    if (name == "exact") {
      return SolverKind::Exact;
    }
    if (name == "greedy") {
      return SolverKind::Greedy;
    }
    throw std::invalid_argument{"unknown solver '" + std::string{name} + "' (expected exact|greedy)"};
  }

  std::string_view
  solver_name(SolverKind kind)
  {
    return kind == SolverKind::Exact ? "exact" : "greedy";
  }

  RunReport
  receding_horizon_run(
    std::vector<DiscreteThermalModel> const& models,
    std::vector<BuildingState> const& init_states,
    DisturbanceTrace const& disturbances,
    Trace const& reference,
    MPCConfig const& config,
    SolverKind solver,
    std::size_t steps)
  {
    config.validate();
    if (steps == 0) {
      throw std::invalid_argument{"simulation needs at least one step"};
    }
    if (models.empty() || init_states.size() != models.size()) {
      throw std::invalid_argument{"one initial state per building required"};
    }
    if (reference.size() < steps) {
      throw InputError{
        "reference trace underrun: " + std::to_string(reference.size()) + " < "
        + std::to_string(steps) + " steps"};
    }
    if (disturbances.t_out.size() < steps || disturbances.q_solar.size() < steps) {
      throw InputError{
        "disturbance trace underrun: " + std::to_string(disturbances.size()) + " < "
        + std::to_string(steps) + " steps"};
    }
    auto const ns = models.size();
    if (solver == SolverKind::Exact && ns * std::min(config.horizon_np, steps) > exact_solver_max_binaries) {
      throw SolverGuardError{
        "exact solver limited to N_s*N_p <= " + std::to_string(exact_solver_max_binaries)
        + " binaries (got " + std::to_string(ns * std::min(config.horizon_np, steps))
        + "); use --solver greedy"};
    }

    double capacity = 0.0;
    double max_rate = 0.0;
    for (auto const& m : models) {
      capacity += m.p_rate;
      max_rate = std::max(max_rate, m.p_rate);
    }

    RunReport report;
    report.step_seconds = reference.step_seconds;
    report.comfort_min = config.comfort_min;
    report.comfort_max = config.comfort_max;
    report.max_p_rate = max_rate;
    report.net_pv_kw.assign(reference.values.begin(), reference.values.begin() + steps);
    report.reference_kw.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      report.reference_kw[k] = std::clamp(report.net_pv_kw[k], 0.0, capacity);
    }
    report.aggregate_kw.assign(steps, 0.0);
    report.residual_kw.assign(steps, 0.0);
    report.n_on.assign(steps, 0);
    report.violations.assign(steps, 0);
    report.infeasible_units.assign(steps, 0);
    report.in_envelope.assign(steps, 0);
    report.t_out.assign(disturbances.t_out.begin(), disturbances.t_out.begin() + steps);
    report.q_solar.assign(disturbances.q_solar.begin(), disturbances.q_solar.begin() + steps);
    report.temps.assign(ns, std::vector<double>(steps));
    report.initial_temps.resize(ns);

    auto states = init_states;
    for (std::size_t j = 0; j < ns; ++j) {
      report.initial_temps[j] = states[j].temp;
    }

    for (std::size_t k = 0; k < steps; ++k) {
      MPCConfig local = config;
      local.horizon_np = std::min(config.horizon_np, steps - k);

      DispatchProblem problem;
      problem.models = models;
      problem.init_states = states;
      problem.disturbance_forecast.step_seconds = disturbances.step_seconds;
      problem.disturbance_forecast.t_out.assign(
        disturbances.t_out.begin() + k, disturbances.t_out.begin() + k + local.horizon_np);
      problem.disturbance_forecast.q_solar.assign(
        disturbances.q_solar.begin() + k, disturbances.q_solar.begin() + k + local.horizon_np);
      problem.reference.assign(
        report.reference_kw.begin() + k, report.reference_kw.begin() + k + local.horizon_np);

      auto const result = solver == SolverKind::Exact
        ? solve_exact(problem, local)
        : solve_priority_heuristic(problem, local);

      auto const v = disturbances.at(k);
      double forced_kw = 0.0;
      double free_kw = 0.0;
      double z = 0.0;
      int n_on = 0;
      int infeasible = 0;
      for (std::size_t j = 0; j < ns; ++j) {
        auto const c = classify(models[j], states[j].temp, v, config);
        if (c.rule == Rule::MustOn) {
          forced_kw += models[j].p_rate;
        } else if (c.rule == Rule::Free) {
          free_kw += models[j].p_rate;
        }
        auto const decision = enforce_comfort(models[j], states[j], v, result.schedule.at(j, 0), config);
        infeasible += decision.infeasible ? 1 : 0;
        z += decision.u * models[j].p_rate;
        n_on += decision.u;
        states[j] = step(models[j], states[j], decision.u, v);
        report.temps[j][k] = states[j].temp;
        if (band_overshoot(states[j].temp, config.comfort_min, config.comfort_max) > 0.0) {
          ++report.violations[k];
        }
      }
      auto const ref = report.reference_kw[k];
      report.aggregate_kw[k] = z;
      report.residual_kw[k] = z - ref;
      report.n_on[k] = n_on;
      report.infeasible_units[k] = infeasible;
      report.in_envelope[k] = (ref >= forced_kw && ref <= forced_kw + free_kw) ? 1 : 0;
    }
    return report;
  }
}
