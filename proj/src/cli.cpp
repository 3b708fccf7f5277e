#include "privdr/cli.hpp"

#include "privdr/dispatch.hpp"
#include "privdr/error.hpp"
#include "privdr/privacy.hpp"
#include "privdr/run_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <stdexcept>

namespace privdr::cli
{
  namespace
  {
    void
    print_summary(std::ostream& log, RunSummary const& s)
    {
      log << "tracking rmse [kW]:        " << format_double(s.rmse_kw) << '\n'
          << "max |residual| [kW]:       " << format_double(s.max_abs_residual_kw) << '\n'
          << "comfort violations:        " << s.comfort_violations << '\n'
          << "clamped reference steps:   " << s.clamped_steps << '\n'
          << "steps with infeasibility:  " << s.infeasible_steps << '\n'
          << "in-envelope steps:         " << s.envelope_steps << '\n'
          << "max in-envelope error [kW]:" << format_double(s.max_envelope_error_kw) << '\n'
          << "noise mean / var [kW,kW2]: " << format_double(s.noise.mean) << " / "
          << format_double(s.noise.variance) << " (expected "
          << format_double(s.noise.expected_variance) << ")\n";
    }

    DPParams
    resolved_dp(ScenarioConfig const& config)
    {
      auto dp = config.dp;
      dp.seed = derive_seeds(config.seed).noise;
      return dp;
    }

    void
    prepare_out_dir(std::filesystem::path const& dir)
    {
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) {
        throw InputError{"cannot create output directory " + dir.string() + ": " + ec.message()};
      }
    }
  }

  ScenarioConfig
  resolve_config(Invocation const& inv)
  {
    auto config = inv.config_path.empty() ? parse_config("") : load_config(inv.config_path);
    if (inv.seed) {
      config.seed = *inv.seed;
    }
    if (inv.epsilon) {
      config.dp.epsilon = *inv.epsilon;
    }
    if (inv.solver) {
      try {
        config.solver = parse_solver(*inv.solver);
      } catch (std::invalid_argument const& e) {
        throw InputError{e.what()};
      }
    }
    if (inv.horizon) {
      config.horizon_steps = *inv.horizon;
    }
    if (inv.horizon_np) {
      config.mpc.horizon_np = *inv.horizon_np;
    }
    config.validate();
    return config;
  }

  void
  cmd_noise(Invocation const& inv, std::ostream& log)
  {
    auto const config = resolve_config(inv);
    auto const dp = resolved_dp(config);
    prepare_out_dir(inv.out_dir);

    auto const noise = generate_noise_trace(dp, config.horizon_steps, config.step_seconds);
    write_noise_csv(inv.out_dir / run_files::noise, noise);
    write_histogram_csv(inv.out_dir / run_files::histogram, noise_histogram(noise.values, inv.bins));
    auto const moments = noise_moment_check(noise.values, dp);
    write_moments_csv(inv.out_dir / run_files::moments, moments, laplace_scale(dp));
    write_manifest(inv.out_dir / run_files::manifest,
                   Manifest{config, dp, config.building.p_rate});

    log << "noise: " << noise.size() << " steps, lambda = " << format_double(laplace_scale(dp))
        << " kW, mean " << format_double(moments.mean) << ", variance "
        << format_double(moments.variance) << " (expected "
        << format_double(moments.expected_variance) << ")\n";
    if (dp.has_delta_slack()) {
      log << "note: delta > 0 is unused slack, the Laplace mechanism gives pure epsilon-DP\n";
    }
  }

  RunSummary
  cmd_simulate(Invocation const& inv, std::ostream& log)
  {
    auto const config = resolve_config(inv);
    auto const dp = resolved_dp(config);
    auto const sim = build_simulation(config);

    auto const noise = generate_noise_trace(dp, config.horizon_steps, config.step_seconds);
    auto const net = compute_net_pv(sim.pv, noise);
    auto report = receding_horizon_run(sim.models, sim.init_states, sim.disturbances, net,
                                       config.mpc, config.solver, config.horizon_steps);
    report.pv_kw = sim.pv.values;
    report.noise_kw = noise.values;

    prepare_out_dir(inv.out_dir);
    double max_rate = 0.0;
    for (auto const& m : sim.models) {
      max_rate = std::max(max_rate, m.p_rate);
    }
    write_manifest(inv.out_dir / run_files::manifest, Manifest{config, dp, max_rate});
    write_run_detail(inv.out_dir, report);

    auto const summary = summarize(report, dp);
    write_summary_csv(inv.out_dir / run_files::summary, summary);
    write_histogram_csv(inv.out_dir / run_files::histogram, noise_histogram(noise.values, inv.bins));
    write_moments_csv(inv.out_dir / run_files::moments, summary.noise, laplace_scale(dp));
    write_plot_data(inv.out_dir / run_files::plot_dir, report, inv.bins);

    log << "simulated " << config.n_buildings << " buildings x " << config.horizon_steps
        << " steps (" << solver_name(config.solver) << " solver)\n";
    print_summary(log, summary);
    return summary;
  }

  RunSummary
  cmd_report(Invocation const& inv, std::ostream& log)
  {
    auto const& dir = inv.out_dir;
    if (!std::filesystem::is_directory(dir)) {
      throw InputError{"run directory does not exist: " + dir.string()};
    }
    if (std::filesystem::is_empty(dir)) {
      throw InputError{"run directory is empty: " + dir.string()};
    }
    auto const manifest = read_manifest(dir / run_files::manifest);
    auto const report = read_run_detail(dir, manifest);
    auto const summary = summarize(report, manifest.dp);
    write_summary_csv(dir / run_files::summary, summary);
    write_histogram_csv(dir / run_files::histogram, noise_histogram(report.noise_kw, inv.bins));
    write_moments_csv(dir / run_files::moments, summary.noise, laplace_scale(manifest.dp));
    write_plot_data(dir / run_files::plot_dir, report, inv.bins);
    print_summary(log, summary);
    return summary;
  }

  int
  run(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
  {
    CLI::App app{"Privacy-preserving PV following with aggregated on/off HVAC loads"};
    app.require_subcommand(1);

    Invocation inv;
    std::string solver;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    std::size_t horizon = 0;
    std::size_t horizon_np = 0;

    auto add_common = [&](CLI::App* sub, bool with_run_options) {
      sub->add_option("--out", inv.out_dir, "Output (or run) directory");
      sub->add_option("--bins", inv.bins, "Histogram bin count")->check(CLI::PositiveNumber);
      if (!with_run_options) {
        return;
      }
      sub->add_option("--config", inv.config_path, "YAML scenario file")->check(CLI::ExistingFile);
      sub->add_option("--seed", seed, "Master seed override");
      sub->add_option("--epsilon", epsilon, "Privacy budget override")->check(CLI::PositiveNumber);
      sub->add_option("--horizon", horizon, "Closed-loop step count override")
        ->check(CLI::PositiveNumber);
    };

    auto* noise = app.add_subcommand("noise", "Generate the privacy noise trace");
    add_common(noise, true);
    auto* simulate = app.add_subcommand("simulate", "Run the closed-loop dispatch");
    add_common(simulate, true);
    simulate->add_option("--solver", solver, "Dispatch solver")
      ->check(CLI::IsMember({"exact", "greedy"}));
    simulate->add_option("--np", horizon_np, "Prediction horizon override")
      ->check(CLI::PositiveNumber);
    simulate->add_flag("--strict", inv.strict, "Exit 3 when comfort infeasibility is flagged");
    auto* report = app.add_subcommand("report", "Rebuild summary and plot data of a run");
    add_common(report, false);

    try {
      app.parse(argc, argv);
    } catch (CLI::CallForHelp const&) {
      out << app.help();
      return ok;
    } catch (CLI::ParseError const& e) {
      err << "error: " << e.what() << '\n';
      return config_error;
    }

    auto const* active = app.get_subcommands().front();
    if (active != report) {
      if (active->count("--seed")) inv.seed = seed;
      if (active->count("--epsilon")) inv.epsilon = epsilon;
      if (active->count("--horizon")) inv.horizon = horizon;
    }
    if (active == simulate) {
      if (simulate->count("--solver")) inv.solver = solver;
      if (simulate->count("--np")) inv.horizon_np = horizon_np;
    }

    try {
      if (active == noise) {
        inv.subcommand = Subcommand::Noise;
        cmd_noise(inv, out);
      } else if (active == simulate) {
        inv.subcommand = Subcommand::Simulate;
        auto const summary = cmd_simulate(inv, out);
        if (inv.strict && summary.infeasible_steps > 0) {
          err << "error: comfort infeasibility flagged at " << summary.infeasible_steps
              << " steps\n";
          return infeasible;
        }
      } else {
        inv.subcommand = Subcommand::Report;
        cmd_report(inv, out);
      }
    } catch (SolverGuardError const& e) {
      err << "error: " << e.what() << '\n';
      return solver_guard;
    } catch (std::exception const& e) {
      err << "error: " << e.what() << '\n';
      return config_error;
    }
    return ok;
  }
}
