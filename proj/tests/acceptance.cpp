// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include "privdr/cli.hpp"
#include "privdr/dispatch.hpp"
#include "privdr/metrics.hpp"
#include "privdr/privacy.hpp"
#include "privdr/run_io.hpp"
#include "privdr/scenario.hpp"
#include "privdr/thermal.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace privdr;
namespace fs = std::filesystem;

namespace
{
  struct Verdict
  {
    bool pass = false;
    std::string detail;
  };

  std::string
  num(double v)
  {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
  }

  DPParams
  reference_budget(std::uint64_t seed)
  {
    DPParams p;
    p.sensitivity = 1.0;
    p.epsilon = 0.1;
    p.seed = seed;
    return p;
  }

  Verdict
  laplace_calibration()
  {
    auto const t0 = std::chrono::steady_clock::now();
    auto const noise = generate_noise_trace(reference_budget(1001), 1000000);
    auto const m = noise_moment_check(noise.values, reference_budget(1001));
    auto const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool const ok = std::abs(m.mean) <= 0.5 && std::abs(m.variance - 200.0) <= 0.05 * 200.0
      && secs <= 5.0;
    return {ok, "mean " + num(m.mean) + ", variance " + num(m.variance) + " vs 200, "
                  + num(secs) + " s"};
  }

  Verdict
  expected_squared_error()
  {
    auto const analytic = mechanism_expected_squared_error(reference_budget(0), 432);
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      auto const noise = generate_noise_trace(reference_budget(50000 + i), 432);
      for (auto x : noise.values) {
        sum_sq += x * x;
      }
      count += noise.size();
    }
    auto const per_step = sum_sq / static_cast<double>(count);
    bool const ok = analytic == 86400.0 && std::abs(per_step - 200.0) <= 0.05 * 200.0;
    return {ok, "2m dQ^2/eps^2 = " + num(analytic) + ", empirical per-step " + num(per_step)};
  }

  Verdict
  ratio_grid()
  {
    auto const p = reference_budget(0);
    int failures = 0;
    int checks = 0;
    for (int x = -50; x <= 50; ++x) {
      for (double s : {-1.0, -0.5, 0.5, 1.0}) {
        ++checks;
        failures += density_ratio_bound_check(p, x, s) ? 0 : 1;
      }
    }
    return {failures == 0, std::to_string(checks) + " grid points, " + std::to_string(failures)
                             + " failures"};
  }

  Verdict
  exact_vs_enumeration()
  {
    auto const t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng{4242};
    int cost_mismatch = 0;
    int schedule_mismatch = 0;
    for (int trial = 0; trial < 200; ++trial) {
      auto const ns = 1 + rng() % 4;
      auto const np = 1 + rng() % (12 / ns);
      auto const [problem, config] = oracle::random_instance(rng, ns, np);
      auto const r = solve_exact(problem, config);
      auto const o = oracle::enumerate(problem, config);
      cost_mismatch += r.cost == o.best.cost ? 0 : 1;
      std::vector<int> flat{r.schedule.u.begin(), r.schedule.u.end()};
      schedule_mismatch += flat == o.schedule ? 0 : 1;
    }
    auto const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool const ok = cost_mismatch == 0 && schedule_mismatch == 0 && secs <= 60.0;
    return {ok, "200 instances, cost mismatches " + std::to_string(cost_mismatch)
                  + ", schedule mismatches " + std::to_string(schedule_mismatch) + ", "
                  + num(secs) + " s"};
  }

  Verdict
  fleet_replication()
  {
    auto const t0 = std::chrono::steady_clock::now();
    auto const config = parse_config("");
    auto const sim = build_simulation(config);
    auto dp = config.dp;
    dp.seed = derive_seeds(config.seed).noise;
    auto const noise = generate_noise_trace(dp, config.horizon_steps, config.step_seconds);
    auto const net = compute_net_pv(sim.pv, noise);
    auto const report = receding_horizon_run(sim.models, sim.init_states, sim.disturbances, net,
                                             config.mpc, SolverKind::Greedy, config.horizon_steps);
    auto const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    auto const violations = comfort_violation_count(report, 22.5, 23.5);
    auto const half_unit = config.building.p_rate / 2.0;
    std::size_t envelope = 0;
    std::size_t over = 0;
    for (std::size_t k = 0; k < report.n_steps(); ++k) {
      if (report.in_envelope[k]) {
        ++envelope;
        over += std::abs(report.aggregate_kw[k] - report.reference_kw[k]) <= half_unit ? 0 : 1;
      }
    }
    bool const ok = report.n_buildings() == 100 && report.n_steps() == 432 && violations == 0
      && envelope > 0 && over == 0 && secs <= 60.0;
    return {ok, "100 x 432 greedy: violations " + std::to_string(violations) + ", "
                  + std::to_string(envelope) + " in-envelope steps, " + std::to_string(over)
                  + " beyond p_rate/2, max in-envelope error " + num(max_envelope_error(report))
                  + " kW, " + num(secs) + " s"};
  }

  std::string
  slurp(fs::path const& p)
  {
    std::ifstream in{p, std::ios::binary};
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  Verdict
  determinism()
  {
    auto const root = fs::temp_directory_path() / "privdr_acceptance_determinism";
    fs::remove_all(root);
    std::ostringstream log;
    std::vector<fs::path> dirs{root / "a", root / "b"};
    for (auto const& dir : dirs) {
      cli::Invocation inv;
      inv.out_dir = dir;
      inv.seed = 2018;
      cli::cmd_simulate(inv, log);
    }
    std::size_t files = 0;
    std::size_t differing = 0;
    for (auto const& entry : fs::recursive_directory_iterator(dirs[0])) {
      if (!entry.is_regular_file()) {
        continue;
      }
      ++files;
      auto const twin = dirs[1] / fs::relative(entry.path(), dirs[0]);
      differing += (fs::exists(twin) && slurp(entry.path()) == slurp(twin)) ? 0 : 1;
    }
    std::size_t files_b = 0;
    for (auto const& entry : fs::recursive_directory_iterator(dirs[1])) {
      files_b += entry.is_regular_file() ? 1 : 0;
    }
    bool const ok = files > 0 && files == files_b && differing == 0;
    return {ok, std::to_string(files) + " files compared, " + std::to_string(differing)
                  + " differ"};
  }

  Verdict
  thermal_checks()
  {
    double worst_rel = 0.0;
    for (double a = -3.0; a <= 1.0; a += 0.125) {
      for (int dt : {6, 60, 600, 1200, 3600}) {
        auto const dt_h = dt / 3600.0;
        if (std::abs(a * dt_h) > 1.0) {
          continue;
        }
        auto const d = discretize(ContinuousThermalModel{a, -6.0, 0.5, 1.0, 5.0}, dt);
        auto const gain = oracle::series_gain(a, dt_h);
        auto const rel = [](double got, double want) {
          return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
        };
        worst_rel = std::max({worst_rel, rel(d.a_d, oracle::series_exp(a * dt_h)),
                              rel(d.b_d, -6.0 * gain), rel(d.g_d_temp, 0.5 * gain),
                              rel(d.g_d_solar, 1.0 * gain)});
      }
    }

    // log-error slope of constant-input trajectories
    auto const m = discretize(ContinuousThermalModel{-0.5, -6.0, 0.5, 1.0, 5.0});
    double worst_slope = 0.0;
    for (int u : {0, 1}) {
      Disturbance const v{30.0, 0.5};
      auto const target = steady_state_temp(m, u, v);
      BuildingState s{23.0, 0};
      std::vector<double> xs;
      std::vector<double> ys;
      for (int n = 1; n <= 80; ++n) {
        s = step(m, s, u, v);
        auto const err = std::abs(s.temp - target);
        if (err < 1e-9) {
          break;
        }
        xs.push_back(n);
        ys.push_back(std::log(err));
      }
      auto const nx = static_cast<double>(xs.size());
      auto const mx = std::accumulate(xs.begin(), xs.end(), 0.0) / nx;
      auto const my = std::accumulate(ys.begin(), ys.end(), 0.0) / nx;
      double sxy = 0.0;
      double sxx = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      auto const slope = sxy / sxx;
      worst_slope = std::max(worst_slope, std::abs(slope / std::log(m.a_d) - 1.0));
    }
    bool const ok = worst_rel <= 1e-10 && worst_slope <= 0.02;
    return {ok, "max relative discretization error " + num(worst_rel)
                  + ", worst log-slope deviation " + num(100.0 * worst_slope) + "%"};
  }

  Verdict
  histogram_view()
  {
    auto const config = parse_config("");
    auto dp = config.dp;
    dp.seed = derive_seeds(config.seed).noise;
    auto const noise = generate_noise_trace(dp, config.horizon_steps);
    auto const h = noise_histogram(noise.values, 30);
    auto const total = std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0});

    auto const big = generate_noise_trace(reference_budget(777), 1000000);
    auto const asym = histogram_zero_asymmetry(zero_centered_histogram(big.values, 60));
    bool const ok = total == 432 && asym < 0.01;
    return {ok, "default trace counts " + std::to_string(total) + ", 1e6-sample asymmetry "
                  + num(100.0 * asym) + "%"};
  }
}

int
main()
{
  struct Criterion
  {
    char const* name;
    std::function<Verdict()> run;
  };
  std::vector<Criterion> const criteria{
    {"AC1 laplace calibration", laplace_calibration},
    {"AC2 expected squared error", expected_squared_error},
    {"AC3 density ratio grid", ratio_grid},
    {"AC4 exact solver vs enumeration", exact_vs_enumeration},
    {"AC5 100-building replication", fleet_replication},
    {"AC6 end-to-end determinism", determinism},
    {"AC7 thermal model checks", thermal_checks},
    {"AC8 histogram view", histogram_view},
  };

  int failed = 0;
  for (auto const& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (std::exception const& e) {
      v = {false, std::string{"exception: "} + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
