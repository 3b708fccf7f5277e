#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "privdr/cli.hpp"
#include "privdr/run_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace privdr;
namespace fs = std::filesystem;

namespace
{
  fs::path
  fresh_dir(std::string const& name)
  {
    auto const dir = fs::temp_directory_path() / "privdr_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir.parent_path());
    return dir;
  }

  struct Outcome
  {
    int code = 0;
    std::string out;
    std::string err;
  };

  Outcome
  invoke(std::vector<std::string> args)
  {
    args.insert(args.begin(), "privdr");
    std::vector<char const*> argv;
    for (auto const& a : args) {
      argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    auto const code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  std::string
  slurp(fs::path const& p)
  {
    std::ifstream in{p, std::ios::binary};
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::size_t
  line_count(fs::path const& p)
  {
    std::ifstream in{p};
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) {
      ++n;
    }
    return n;
  }

  fs::path
  write_config(fs::path const& dir, std::string const& text)
  {
    fs::create_directories(dir);
    auto const path = dir / "config.yaml";
    std::ofstream{path} << text;
    return path;
  }
}

TEST_CASE("noise subcommand")
{
  auto const a = fresh_dir("noise_a");
  auto const b = fresh_dir("noise_b");
  REQUIRE(invoke({"noise", "--out", a.string()}).code == 0);
  REQUIRE(invoke({"noise", "--out", b.string()}).code == 0);
  CHECK(line_count(a / run_files::noise) == 433);
  CHECK(slurp(a / run_files::noise) == slurp(b / run_files::noise));
  CHECK(slurp(a / run_files::histogram) == slurp(b / run_files::histogram));
  CHECK(slurp(a / run_files::moments) == slurp(b / run_files::moments));

  auto const c = fresh_dir("noise_eps1");
  REQUIRE(invoke({"noise", "--out", c.string(), "--epsilon", "1"}).code == 0);
  auto const m = read_manifest(c / run_files::manifest);
  CHECK(laplace_scale(m.dp) == 1.0);
  CHECK(slurp(c / run_files::moments).find("\n1,") != std::string::npos);
}

TEST_CASE("config errors exit with code 1")
{
  auto const dir = fresh_dir("bad_config");
  auto const cfg = write_config(dir, "dp: {epsilon: 0}\n");
  auto const r = invoke({"noise", "--config", cfg.string(), "--out", (dir / "out").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("epsilon") != std::string::npos);

  CHECK(invoke({"simulate", "--solver", "simplex"}).code == 1);
  CHECK(invoke({}).code == 1);
}

TEST_CASE("exact solver at fleet scale is refused with code 2")
{
  auto const dir = fresh_dir("guard");
  auto const r = invoke({"simulate", "--out", dir.string(), "--solver", "exact"});
  CHECK(r.code == 2);
  CHECK(r.err.find("greedy") != std::string::npos);
}

TEST_CASE("small exact simulation and report regeneration")
{
  auto const dir = fresh_dir("exact_small");
  auto const cfg = write_config(dir, "n_buildings: 2\nhorizon_steps: 24\nmpc: {horizon_np: 4}\n");
  auto const out = dir / "run";
  auto const r = invoke({"simulate", "--config", cfg.string(), "--out", out.string(),
                         "--solver", "exact"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("comfort violations:        0") != std::string::npos);
  CHECK(line_count(out / run_files::dispatch) == 25);
  for (auto const* plot : {"noise.dat", "noise_histogram.dat", "net_pv.dat", "temperatures.dat",
                           "tracking.dat"}) {
    CHECK(fs::exists(out / run_files::plot_dir / plot));
  }

  auto const summary = slurp(out / run_files::summary);
  fs::remove(out / run_files::summary);
  REQUIRE(invoke({"report", "--out", out.string()}).code == 0);
  CHECK(slurp(out / run_files::summary) == summary);
}

TEST_CASE("report errors name the missing piece")
{
  auto const empty = fresh_dir("report_empty");
  fs::create_directories(empty);
  auto r = invoke({"report", "--out", empty.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("empty") != std::string::npos);

  auto const dir = fresh_dir("report_missing");
  auto const cfg = write_config(dir, "n_buildings: 3\nhorizon_steps: 12\n");
  auto const out = dir / "run";
  REQUIRE(invoke({"simulate", "--config", cfg.string(), "--out", out.string()}).code == 0);
  fs::remove(out / run_files::dispatch);
  r = invoke({"report", "--out", out.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("dispatch.csv") != std::string::npos);

  CHECK(invoke({"report", "--out", (dir / "nowhere").string()}).code == 1);
}

TEST_CASE("strict mode flags comfort infeasibility with code 3")
{
  auto const dir = fresh_dir("strict");
  // a one-step swing of ~0.96 degC cannot fit a 0.2 degC band
  auto const cfg = write_config(dir,
    "n_buildings: 3\nhorizon_steps: 12\nmpc: {comfort_min_c: 22.9, comfort_max_c: 23.1}\n");
  auto const out = dir / "run";
  CHECK(invoke({"simulate", "--config", cfg.string(), "--out", out.string()}).code == 0);
  CHECK(invoke({"simulate", "--config", cfg.string(), "--out", out.string(), "--strict"}).code == 3);
}

TEST_CASE("overrides win over the config file")
{
  auto const dir = fresh_dir("overrides");
  auto const cfg = write_config(dir, "seed: 1\nhorizon_steps: 100\ndp: {epsilon: 0.2}\n");
  cli::Invocation inv;
  inv.config_path = cfg;
  inv.seed = 77;
  inv.epsilon = 0.5;
  inv.solver = "exact";
  inv.horizon = 10;
  inv.horizon_np = 2;
  auto const c = cli::resolve_config(inv);
  CHECK(c.seed == 77);
  CHECK(c.dp.epsilon == 0.5);
  CHECK(c.solver == SolverKind::Exact);
  CHECK(c.horizon_steps == 10);
  CHECK(c.mpc.horizon_np == 2);
}
